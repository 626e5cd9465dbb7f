//! Grammar-driven generator of valid MQL statement text.
//!
//! Written directly from the published grammar rather than from the
//! parser's syntax tree, so it can catch disagreements between the two.
//! Keyword case is randomised and spacing varies.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &["headline", "year", "cases", "district", "x1", "x_2", "Labels", "score", "t", "region_id"];
const QUOTED: &[&str] = &["district-tag", "last-published-at", "count", "from", "two words", "a\"b"];
const TABLES: &[&str] = &["ProthomAlo", "NGORep", "reports", "unknowns", "t1"];
const ALGORITHMS: &[&str] = &["KMeans", "OLS", "KNN", "LinearRegression"];

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn kw(&mut self, word: &str) -> String {
        match self.rng.random_range(0..4) {
            0 => word.to_lowercase(),
            1 => word.chars().enumerate().map(|(i, c)| if i % 2 == 0 { c.to_ascii_lowercase() } else { c }).collect(),
            _ => word.to_string(),
        }
    }

    fn sp(&mut self) -> &'static str {
        [" ", " ", "  ", "\n", "\t "].choose(&mut self.rng).unwrap()
    }

    fn ident(&mut self) -> String {
        if self.rng.random_bool(0.25) {
            let q = QUOTED.choose(&mut self.rng).unwrap();
            format!("\"{}\"", q.replace('"', "\"\""))
        } else {
            WORDS.choose(&mut self.rng).unwrap().to_string()
        }
    }

    fn table(&mut self) -> String {
        if self.rng.random_bool(0.1) {
            "\"news-2020\"".into()
        } else {
            TABLES.choose(&mut self.rng).unwrap().to_string()
        }
    }

    fn list(&mut self, f: fn(&mut Gen) -> String, max: usize) -> String {
        let n = self.rng.random_range(1..=max);
        (0..n).map(|_| f(self)).collect::<Vec<_>>().join(", ")
    }

    fn string_lit(&mut self) -> String {
        let s = *["Dhaka", "it's", "", "total", "gang rape", "a,b"].choose(&mut self.rng).unwrap();
        format!("'{}'", s.replace('\'', "''"))
    }

    fn literal(&mut self) -> String {
        match self.rng.random_range(0..6) {
            0 | 1 => self.string_lit(),
            2 => self.rng.random_range(-50i64..5000).to_string(),
            3 => format!("{}.{:02}", self.rng.random_range(-20i64..200), self.rng.random_range(0..100)),
            4 => {
                let d = format!(
                    "{:04}-{:02}-{:02}",
                    self.rng.random_range(1990..2030),
                    self.rng.random_range(1..=12),
                    self.rng.random_range(1..=28)
                );
                format!("{} '{d}'", self.kw("DATE"))
            }
            _ => format!(
                "{} '{:04}-{:02}-{:02}T{:02}:{:02}:{:02}'",
                self.kw("DATE"),
                self.rng.random_range(1990..2030),
                self.rng.random_range(1..=12),
                self.rng.random_range(1..=28),
                self.rng.random_range(0..24),
                self.rng.random_range(0..60),
                self.rng.random_range(0..60)
            ),
        }
    }

    fn condition(&mut self, depth: u32) -> String {
        let leaf = depth == 0 || self.rng.random_bool(0.4);
        if leaf {
            let op = *["=", "<>", "<", "<=", ">", ">="].choose(&mut self.rng).unwrap();
            let col = self.ident();
            let lit = self.literal();
            return if self.rng.random_bool(0.8) { format!("{col} {op} {lit}") } else { format!("{lit} {op} {col}") };
        }
        match self.rng.random_range(0..4) {
            0 => format!("{} {} {}", self.condition(depth - 1), self.kw("AND"), self.condition(depth - 1)),
            1 => format!("{} {} {}", self.condition(depth - 1), self.kw("OR"), self.condition(depth - 1)),
            2 => format!("{} {}", self.kw("NOT"), self.condition(depth - 1)),
            _ => format!("({})", self.condition(depth - 1)),
        }
    }

    fn aggregate(&mut self) -> String {
        let col = self.ident();
        match self.rng.random_range(0..6) {
            0 => format!("{}(*)", self.kw("COUNT")),
            1 => format!("{}({col})", self.kw("COUNT")),
            2 => format!("{}({} {col})", self.kw("COUNT"), self.kw("DISTINCT")),
            3 => format!("{}({col})", self.kw("MIN")),
            4 => format!("{}({col})", self.kw("MAX")),
            _ => format!("{}({col})", self.kw("AVG")),
        }
    }

    /// An integer expression; constant-only expressions are built from `+`
    /// and `*` over positive literals so they stay at least 1.
    fn int_expr(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.random_bool(0.5) {
            return if self.rng.random_bool(0.6) { self.rng.random_range(1..12).to_string() } else { self.aggregate() };
        }
        let agg = self.aggregate();
        let lit = self.rng.random_range(1..9);
        match self.rng.random_range(0..5) {
            0 => format!("{agg} / {lit}"),
            1 => format!("{agg} - {lit}"),
            2 => format!("({}) * {lit}", self.int_expr(depth - 1)),
            3 => format!("{lit} + {}", self.int_expr(depth - 1)),
            _ => format!("{} * ({} + {lit})", self.int_expr(depth - 1), self.int_expr(depth - 1)),
        }
    }

    fn class_label(&mut self) -> String {
        if self.rng.random_bool(0.5) {
            ["pos", "neg", "low", "high", "mid"].choose(&mut self.rng).unwrap().to_string()
        } else {
            format!("'{}'", ["gang rape", "a-b", "Total", "x y"].choose(&mut self.rng).unwrap())
        }
    }

    /// `construct` bodies forbid USING MODEL,
    /// DISPLAY OF and OVER.
    fn body(&mut self, construct: bool) -> String {
        let mut parts = Vec::new();
        if !construct && self.rng.random_bool(0.4) {
            parts.push(format!("{} {}", self.kw("DISPLAY"), self.kw("OF")));
        }
        let over = |g: &mut Gen| {
            if !construct && g.rng.random_bool(0.3) {
                format!(" {} {}", g.kw("OVER"), g.table())
            } else {
                String::new()
            }
        };
        match self.rng.random_range(0..3) {
            0 => {
                let o = over(self);
                parts.push(format!("{} {}{o}", self.kw("PREDICTION"), self.ident()));
            }
            1 => {
                let n = self.rng.random_range(2..=4);
                let mut labels: Vec<String> = Vec::new();
                while labels.len() < n {
                    let l = self.class_label();
                    if !labels.contains(&l) {
                        labels.push(l);
                    }
                }
                let o = over(self);
                parts.push(format!("{} {} {}{o}", self.kw("CLASSIFICATION"), self.kw("INTO"), labels.join(", ")));
            }
            _ => {
                let k = self.int_expr(2);
                parts.push(format!("{} {} {k}", self.kw("CLUSTER"), self.kw("OF")));
            }
        }
        let mut uses_model = false;
        match self.rng.random_range(0..4) {
            0 => {
                let a = *ALGORITHMS.choose(&mut self.rng).unwrap();
                parts.push(format!("{} {a}", self.kw("ALGORITHM")));
            }
            1 => {
                let a = *ALGORITHMS.choose(&mut self.rng).unwrap();
                parts.push(format!("{} {} {a}", self.kw("USING"), self.kw("ALGORITHM")));
            }
            2 if !construct => {
                uses_model = true;
                parts.push(format!("{} {} m{}", self.kw("USING"), self.kw("MODEL"), self.rng.random_range(0..9)));
            }
            _ => {}
        }
        if self.rng.random_bool(0.3) {
            let p = self.rng.random_range(1..100);
            parts.push(format!("{} {} {} 0.{p:02}", self.kw("WITH"), self.kw("MODEL"), self.kw("ACCURACY")));
        }
        if self.rng.random_bool(0.3) {
            parts.push(format!("{} {}", self.kw("LABEL"), self.list(Gen::ident, 2)));
        }
        if !uses_model || self.rng.random_bool(0.5) {
            parts.push(format!("{} {}", self.kw("FEATURES"), self.list(Gen::ident, 3)));
        }
        parts.push(format!("{} {}", self.kw("FROM"), self.list(Gen::table, 2)));
        if self.rng.random_bool(0.5) {
            parts.push(format!("{} {}", self.kw("WHERE"), self.condition(3)));
        }
        let sep = self.sp();
        parts.join(sep)
    }

    fn directive(&mut self) -> String {
        match self.rng.random_range(0..3) {
            0 => format!("dropnull({})", self.ident()),
            1 => format!("fillnull({}, {})", self.ident(), self.literal()),
            _ => "dedupe()".into(),
        }
    }

    fn statement(&mut self) -> String {
        let text = match self.rng.random_range(0..10) {
            0..=6 => format!("{} {}", self.kw("GENERATE"), self.body(false)),
            7 | 8 => format!(
                "{} {} model_{} {} {}",
                self.kw("CONSTRUCT"),
                self.kw("MODEL"),
                self.rng.random_range(0..100),
                self.kw("AS"),
                self.body(true)
            ),
            _ => {
                format!("{} {} {} {}", self.kw("INSPECT"), self.table(), self.kw("APPLY"), self.list(Gen::directive, 3))
            }
        };
        format!("{text};")
    }
}

/// `n` valid statements, deterministic per seed.
pub fn statements(n: usize, seed: u64) -> Vec<String> {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed) };
    (0..n).map(|_| g.statement()).collect()
}
