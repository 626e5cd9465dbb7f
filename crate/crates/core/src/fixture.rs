//! Seeded synthetic datasets shaped like the two investigative corpora the
//! pipeline was built around, plus the ground truth they were drawn from.
//!
//! - `prothomalo.csv`: one row per news report (`ID, URL, headline,
//!   district-tag, division-tag, subdistrict-tag, last-published-at,
//!   offset`) with a planted seasonal peak, a skewed district distribution
//!   and three headline topic groups.
//! - `ngorep.csv`: annual NGO counts in long form (`year, category, count`).
//! - `districts.geojson`: one rectangular cell per district, laid out on a
//!   coarse grid that follows the districts' rough geography.
//! - `truth.json`: the exact tallies and labels the rows were generated with.
//! - `manifest.json`: a registry manifest naming both tables.
//!
//! Output is a pure function of `(rows, seed)`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::store::{GeometryRef, Manifest, ManifestEntry, MANIFEST_VERSION};

pub const DEFAULT_ROWS: usize = 300;
pub const DEFAULT_SEED: u64 = 42;

pub const PROTHOMALO: &str = "ProthomAlo";
pub const NGOREP: &str = "NGORep";

/// The scripted four-question conversation over the fixture: monthly
/// trend, district hot spots, annual trend, headline categories.
pub const SCRIPT: [&str; 4] = [
    "How often incidents of rape happen in Bangladesh? Could you generate a monthly trend of rape incidents from available reports?",
    "Please show the geographic hot spots rape incidents in the country.",
    "Are child rape cases worsening over the years? Show the annual trend.",
    "What are the top 3 categories of rape news headlines?",
];

pub const PROTHOMALO_COLUMNS: [&str; 8] =
    ["ID", "URL", "headline", "district-tag", "division-tag", "subdistrict-tag", "last-published-at", "offset"];

pub const PROTHOMALO_DESCRIPTION: &str = "News reports of rape incidents collected from a national daily newspaper. \
Each report has a headline, a URL, the publication date and time, and district, division and subdistrict \
location tags, so incidents can be counted per month or per district.";

pub const NGOREP_DESCRIPTION: &str = "Annual child rape statistics compiled from NGO yearly reports: the number of \
cases per year and category (attempt, suicide, gang rape, murder, total).";

/// `(district, division, grid column, grid row)`; row 0 is the north edge.
const DISTRICTS: [(&str, &str, u32, u32); 22] = [
    ("Dhaka", "Dhaka", 3, 3),
    ("Chattogram", "Chattogram", 5, 5),
    ("Gazipur", "Dhaka", 3, 2),
    ("Narayanganj", "Dhaka", 4, 3),
    ("Cumilla", "Chattogram", 5, 3),
    ("Mymensingh", "Mymensingh", 3, 1),
    ("Khulna", "Khulna", 1, 4),
    ("Rajshahi", "Rajshahi", 0, 2),
    ("Sylhet", "Sylhet", 5, 1),
    ("Tangail", "Dhaka", 2, 2),
    ("Bogura", "Rajshahi", 2, 1),
    ("Rangpur", "Rangpur", 2, 0),
    ("Barishal", "Barishal", 2, 4),
    ("Jashore", "Khulna", 1, 3),
    ("Noakhali", "Chattogram", 4, 4),
    ("Dinajpur", "Rangpur", 1, 0),
    ("Pabna", "Rajshahi", 1, 2),
    ("Netrokona", "Mymensingh", 4, 1),
    ("Habiganj", "Sylhet", 5, 2),
    ("Feni", "Chattogram", 5, 4),
    ("Satkhira", "Khulna", 0, 4),
    ("Bhola", "Barishal", 3, 5),
];

const SUBDISTRICTS: [&str; 4] = ["Sadar", "North", "South", "Town"];

/// Topic vocabularies; each headline draws four words from one of them.
const TOPICS: [(&str, [&str; 8]); 3] = [
    ("arrest", ["police", "arrested", "suspect", "detained", "raid", "custody", "nabbed", "accused"]),
    ("court", ["court", "verdict", "sentenced", "tribunal", "judge", "trial", "convicted", "bail"]),
    ("protest", ["protest", "rally", "activists", "demand", "justice", "march", "students", "rights"]),
];

const NGO_CATEGORIES: [&str; 5] = ["attempt", "suicide", "gang rape", "murder", "total"];
const FIRST_MONTH: (i32, u32) = (2019, 1);
const MONTHS: usize = 36;
const NGO_YEARS: std::ops::RangeInclusive<i64> = 2001..=2021;

/// The values every oracle checks against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub rows: usize,
    /// Reports per `YYYY-MM` of `last-published-at` (months with none are absent).
    pub monthly: BTreeMap<String, u64>,
    pub districts: BTreeMap<String, u64>,
    pub divisions: BTreeMap<String, u64>,
    pub peak_month: String,
    pub top_district: String,
    pub topic_names: Vec<String>,
    /// Planted topic index for each report, in `ID` order.
    pub topics: Vec<usize>,
    /// NGORep `total` per year.
    pub annual_totals: BTreeMap<i64, i64>,
}

/// Generated file contents, not yet on disk.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub prothomalo_csv: String,
    pub ngorep_csv: String,
    pub geometry: String,
    pub truth: GroundTruth,
}

/// Where [`Fixture::write`] put each file.
#[derive(Debug, Clone)]
pub struct FixturePaths {
    pub dir: PathBuf,
    pub prothomalo: PathBuf,
    pub ngorep: PathBuf,
    pub geometry: PathBuf,
    pub truth: PathBuf,
    pub manifest: PathBuf,
}

struct Report {
    published: chrono::NaiveDateTime,
    headline: String,
    district: usize,
    subdistrict: String,
    topic: usize,
}

pub fn generate(rows: usize, seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let month_weights: Vec<f64> = (0..MONTHS)
        .map(|m| {
            let m = m as f64;
            // a sharp peak at the start of 2020 and a smaller one mid-2021
            1.0 + 3.0 * (-(m - 12.0).powi(2) / 4.5).exp() + 1.2 * (-(m - 29.0).powi(2) / 4.5).exp()
        })
        .collect();
    let district_weights: Vec<f64> = (0..DISTRICTS.len()).map(|i| 1.0 / (i as f64 + 1.0).powf(0.9)).collect();

    let mut reports: Vec<Report> = (0..rows)
        .map(|_| {
            let m = weighted(&mut rng, &month_weights);
            let (y, mo) = month_at(m);
            let first = NaiveDate::from_ymd_opt(y, mo, 1).expect("valid month");
            let days = days_in_month(first);
            let date = first + chrono::Days::new(rng.random_range(0..days) as u64);
            let published = date
                .and_hms_opt(rng.random_range(0..24), rng.random_range(0..60), rng.random_range(0..60))
                .expect("valid time");
            let district = weighted(&mut rng, &district_weights);
            let topic = rng.random_range(0..TOPICS.len());
            let mut words: Vec<&str> = TOPICS[topic].1.choose_multiple(&mut rng, 4).copied().collect();
            words.shuffle(&mut rng);
            let headline = capitalise(&format!(
                "{} {} {} in {} rape case {}",
                words[0], words[1], words[2], DISTRICTS[district].0, words[3]
            ));
            let sub = SUBDISTRICTS.choose(&mut rng).expect("non-empty");
            Report { published, headline, district, subdistrict: format!("{} {sub}", DISTRICTS[district].0), topic }
        })
        .collect();
    reports.sort_by_key(|r| r.published);

    let mut monthly = BTreeMap::new();
    let mut districts = BTreeMap::new();
    let mut divisions = BTreeMap::new();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PROTHOMALO_COLUMNS).expect("in-memory write");
    for (i, r) in reports.iter().enumerate() {
        let id = i + 1;
        let (district, division, _, _) = DISTRICTS[r.district];
        *monthly.entry(r.published.format("%Y-%m").to_string()).or_insert(0) += 1;
        *districts.entry(district.to_string()).or_insert(0) += 1;
        *divisions.entry(division.to_string()).or_insert(0) += 1;
        w.write_record([
            id.to_string(),
            format!("https://news.example.org/bangladesh/{id}"),
            r.headline.clone(),
            district.to_string(),
            division.to_string(),
            r.subdistrict.clone(),
            r.published.format("%Y-%m-%dT%H:%M:%S").to_string(),
            ((id - 1) / 20 * 20).to_string(),
        ])
        .expect("in-memory write");
    }
    let prothomalo_csv = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");

    let mut annual_totals = BTreeMap::new();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["year", "category", "count"]).expect("in-memory write");
    for year in NGO_YEARS {
        let t = (year - 2001) as f64;
        let surge = if year >= 2017 { 90.0 * (year - 2016) as f64 } else { 0.0 };
        let dip = if year == 2021 { 160.0 } else { 0.0 };
        let total = (180.0 + 12.0 * t + surge - dip + rng.random_range(-15.0..15.0)).round() as i64;
        annual_totals.insert(year, total);
        for (category, share) in NGO_CATEGORIES.iter().zip([0.18, 0.03, 0.14, 0.06, 1.0]) {
            let count = if *category == "total" {
                total
            } else {
                (total as f64 * share * rng.random_range(0.8..1.2)).round() as i64
            };
            w.write_record([year.to_string(), category.to_string(), count.to_string()]).expect("in-memory write");
        }
    }
    let ngorep_csv = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");

    let peak_month = argmax(&monthly);
    let top_district = argmax(&districts);
    let truth = GroundTruth {
        seed,
        rows,
        monthly,
        districts,
        divisions,
        peak_month,
        top_district,
        topic_names: TOPICS.iter().map(|t| t.0.to_string()).collect(),
        topics: reports.iter().map(|r| r.topic).collect(),
        annual_totals,
    };
    Fixture { prothomalo_csv, ngorep_csv, geometry: district_geojson(), truth }
}

impl Fixture {
    /// Writes every file into `dir` (created if needed).
    pub fn write(&self, dir: &Path) -> std::io::Result<FixturePaths> {
        std::fs::create_dir_all(dir)?;
        let paths = FixturePaths {
            dir: dir.to_path_buf(),
            prothomalo: dir.join("prothomalo.csv"),
            ngorep: dir.join("ngorep.csv"),
            geometry: dir.join("districts.geojson"),
            truth: dir.join("truth.json"),
            manifest: dir.join("manifest.json"),
        };
        write_atomic(&paths.prothomalo, self.prothomalo_csv.as_bytes())?;
        write_atomic(&paths.ngorep, self.ngorep_csv.as_bytes())?;
        write_atomic(&paths.geometry, self.geometry.as_bytes())?;
        let truth = serde_json::to_string_pretty(&self.truth).expect("truth serializes") + "\n";
        write_atomic(&paths.truth, truth.as_bytes())?;
        let manifest = serde_json::to_string_pretty(&manifest()).expect("manifest serializes") + "\n";
        write_atomic(&paths.manifest, manifest.as_bytes())?;
        Ok(paths)
    }
}

/// The manifest written next to the fixture files (paths are relative).
pub fn manifest() -> Manifest {
    Manifest {
        version: MANIFEST_VERSION,
        datasets: vec![
            ManifestEntry {
                name: PROTHOMALO.into(),
                csv_path: "prothomalo.csv".into(),
                description: PROTHOMALO_DESCRIPTION.into(),
                declared_schema: None,
                geometry: Some(GeometryRef {
                    path: "districts.geojson".into(),
                    id_property: "name".into(),
                    region_column: "district-tag".into(),
                }),
            },
            ManifestEntry {
                name: NGOREP.into(),
                csv_path: "ngorep.csv".into(),
                description: NGOREP_DESCRIPTION.into(),
                declared_schema: None,
                geometry: None,
            },
        ],
    }
}

/// GeoJSON with one grid cell per district, keyed by `name`.
pub fn district_geojson() -> String {
    const LON0: f64 = 88.0;
    const LAT0: f64 = 26.6;
    const DX: f64 = 0.75;
    const DY: f64 = 0.9;
    let features: Vec<serde_json::Value> = DISTRICTS
        .iter()
        .map(|(name, division, col, row)| {
            let (x0, y1) = (LON0 + DX * *col as f64, LAT0 - DY * *row as f64);
            let (x1, y0) = (x0 + DX, y1 - DY);
            serde_json::json!({
                "type": "Feature",
                "properties": {"name": name, "division": division},
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]],
                },
            })
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({"type": "FeatureCollection", "features": features}))
        .expect("geojson serializes")
        + "\n"
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn weighted(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.random_range(0.0..total);
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

fn month_at(offset: usize) -> (i32, u32) {
    let m0 = FIRST_MONTH.0 * 12 + FIRST_MONTH.1 as i32 - 1 + offset as i32;
    (m0 / 12, (m0 % 12) as u32 + 1)
}

fn days_in_month(first: NaiveDate) -> u32 {
    let next = if first.month() == 12 {
        NaiveDate::from_ymd_opt(first.year() + 1, 1, 1)
    } else {
        NaiveDate::from_ymd_opt(first.year(), first.month() + 1, 1)
    };
    next.expect("valid month").signed_duration_since(first).num_days() as u32
}

fn capitalise(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Largest count; ties go to the smallest key.
fn argmax(counts: &BTreeMap<String, u64>) -> String {
    let mut best: Option<(&String, u64)> = None;
    for (k, v) in counts {
        if best.is_none_or(|(_, b)| *v > b) {
            best = Some((k, *v));
        }
    }
    best.map(|b| b.0.clone()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_consistent() {
        let a = generate(300, 42);
        let b = generate(300, 42);
        assert_eq!(a.prothomalo_csv, b.prothomalo_csv);
        assert_eq!(a.ngorep_csv, b.ngorep_csv);
        assert_ne!(a.prothomalo_csv, generate(300, 7).prothomalo_csv);
        assert_eq!(a.truth.monthly.values().sum::<u64>(), 300);
        assert_eq!(a.truth.districts.values().sum::<u64>(), 300);
        assert_eq!(a.truth.topics.len(), 300);
        let header = a.prothomalo_csv.lines().next().unwrap();
        assert_eq!(header.split(',').count(), 8);
    }

    #[test]
    fn month_arithmetic() {
        assert_eq!(month_at(0), (2019, 1));
        assert_eq!(month_at(12), (2020, 1));
        assert_eq!(month_at(35), (2021, 12));
        assert_eq!(days_in_month(NaiveDate::from_ymd_opt(2020, 2, 1).unwrap()), 29);
    }
}
