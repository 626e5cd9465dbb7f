//! The dataset registry: named tables paired with natural-language
//! descriptions, persisted as a JSON manifest.
//!
//! Tables are loaded from their source CSV on first use and shared
//! read-only afterwards. Registration takes the write lock, so concurrent
//! registrations are serialized while readers proceed in parallel.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use super::error::{Result, StoreError};
use super::ingest::ingest_csv;
use super::table::{ColumnSpec, Table};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub name: String,
    /// Purpose, capabilities, columns and what the columns mean.
    pub description: String,
    pub source: Option<PathBuf>,
    /// RFC 3339 time the table was last read from its source.
    pub ingested_at: Option<String>,
    pub declared_schema: Option<Vec<ColumnSpec>>,
    /// Region polygons for map charts of this dataset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryRef>,
}

/// A GeoJSON file whose features are keyed by `id_property`, matched
/// against the values of `region_column` in the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryRef {
    pub path: PathBuf,
    pub id_property: String,
    pub region_column: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub datasets: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    /// Relative paths resolve against the manifest's directory.
    pub csv_path: PathBuf,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_schema: Option<Vec<ColumnSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryRef>,
}

struct Entry {
    descriptor: Mutex<DatasetDescriptor>,
    table: Mutex<Option<Arc<Table>>>,
}

impl Entry {
    fn name(&self) -> String {
        self.descriptor.lock().unwrap().name.clone()
    }
}

#[derive(Default)]
pub struct Registry {
    manifest_path: Option<PathBuf>,
    entries: RwLock<Vec<Arc<Entry>>>,
}

impl std::fmt::Debug for Registry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Registry").field("manifest_path", &self.manifest_path).field("datasets", &self.names()).finish()
    }
}

impl Registry {
    /// An in-memory registry with no manifest.
    pub fn new() -> Registry {
        Registry::default()
    }

    /// Opens the manifest at `path`. A missing file yields an empty registry
    /// that will be written on the first CSV registration.
    pub fn open(path: impl Into<PathBuf>) -> Result<Registry> {
        let path = path.into();
        let registry = Registry { manifest_path: Some(path.clone()), entries: RwLock::default() };
        if !path.exists() {
            return Ok(registry);
        }
        let text = std::fs::read_to_string(&path)
            .map_err(|e| StoreError::Io { path: path.clone(), message: e.to_string() })?;
        let manifest: Manifest =
            serde_json::from_str(&text).map_err(|e| StoreError::Manifest(format!("{}: {e}", path.display())))?;
        if manifest.version != MANIFEST_VERSION {
            return Err(StoreError::Manifest(format!(
                "unsupported manifest version {} (expected {MANIFEST_VERSION})",
                manifest.version
            )));
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        {
            let mut entries = registry.entries.write().unwrap();
            for m in manifest.datasets {
                check_new(&entries, &m.name, &m.description)?;
                let source = if m.csv_path.is_absolute() { m.csv_path } else { base.join(m.csv_path) };
                let geometry = m
                    .geometry
                    .map(|g| GeometryRef { path: if g.path.is_absolute() { g.path } else { base.join(g.path) }, ..g });
                entries.push(Arc::new(Entry {
                    descriptor: Mutex::new(DatasetDescriptor {
                        name: m.name,
                        description: m.description,
                        source: Some(source),
                        ingested_at: None,
                        declared_schema: m.declared_schema,
                        geometry,
                    }),
                    table: Mutex::new(None),
                }));
            }
        }
        Ok(registry)
    }

    pub fn manifest_path(&self) -> Option<&Path> {
        self.manifest_path.as_deref()
    }

    /// Registers an in-memory table. Tables registered this way have no
    /// source file and are not written to the manifest.
    pub fn register(&self, table: Table, description: &str) -> Result<DatasetDescriptor> {
        let mut entries = self.entries.write().unwrap();
        check_new(&entries, table.name(), description)?;
        let descriptor = DatasetDescriptor {
            name: table.name().to_string(),
            description: description.trim().to_string(),
            source: None,
            ingested_at: Some(now()),
            declared_schema: None,
            geometry: None,
        };
        entries.push(Arc::new(Entry {
            descriptor: Mutex::new(descriptor.clone()),
            table: Mutex::new(Some(Arc::new(table))),
        }));
        Ok(descriptor)
    }

    /// Ingests `csv_path` as `name`, registers it, and persists the manifest
    /// when the registry has one.
    pub fn register_csv(
        &self,
        name: &str,
        csv_path: &Path,
        description: &str,
        declared: Option<Vec<ColumnSpec>>,
    ) -> Result<(DatasetDescriptor, Arc<Table>)> {
        let table = Arc::new(ingest_csv(csv_path, name, declared.as_deref())?);
        let descriptor = {
            let mut entries = self.entries.write().unwrap();
            check_new(&entries, name, description)?;
            let descriptor = DatasetDescriptor {
                name: name.to_string(),
                description: description.trim().to_string(),
                source: Some(std::path::absolute(csv_path).unwrap_or_else(|_| csv_path.to_path_buf())),
                ingested_at: Some(now()),
                declared_schema: declared,
                geometry: None,
            };
            entries.push(Arc::new(Entry {
                descriptor: Mutex::new(descriptor.clone()),
                table: Mutex::new(Some(table.clone())),
            }));
            descriptor
        };
        if self.manifest_path.is_some() {
            self.save()?;
        }
        Ok((descriptor, table))
    }

    /// Writes the manifest atomically (temporary file, then rename).
    pub fn save(&self) -> Result<()> {
        let path =
            self.manifest_path.as_ref().ok_or_else(|| StoreError::Manifest("registry has no manifest path".into()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let base_abs = std::path::absolute(&base).unwrap_or(base.clone());
        let mut datasets = Vec::new();
        for entry in self.entries.read().unwrap().iter() {
            let d = entry.descriptor.lock().unwrap().clone();
            let Some(source) = d.source else { continue };
            let relative = |p: PathBuf| {
                let abs = std::path::absolute(&p).unwrap_or(p);
                abs.strip_prefix(&base_abs).map(Path::to_path_buf).unwrap_or(abs)
            };
            datasets.push(ManifestEntry {
                name: d.name,
                csv_path: relative(source),
                description: d.description,
                declared_schema: d.declared_schema,
                geometry: d.geometry.map(|g| GeometryRef { path: relative(g.path), ..g }),
            });
        }
        let manifest = Manifest { version: MANIFEST_VERSION, datasets };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let dir = if base.as_os_str().is_empty() { PathBuf::from(".") } else { base };
        std::fs::create_dir_all(&dir).map_err(|e| StoreError::Io { path: dir.clone(), message: e.to_string() })?;
        let io_err = |e: std::io::Error| StoreError::Io { path: path.clone(), message: e.to_string() };
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err)?;
        tmp.write_all(json.as_bytes()).map_err(io_err)?;
        tmp.write_all(b"\n").map_err(io_err)?;
        tmp.persist(path).map_err(|e| io_err(e.error))?;
        Ok(())
    }

    /// Attaches region geometry to a registered dataset and persists the
    /// manifest when the registry has one.
    pub fn attach_geometry(&self, name: &str, geometry: GeometryRef) -> Result<()> {
        let entry = self.entry(name)?;
        entry.descriptor.lock().unwrap().geometry = Some(geometry);
        if self.manifest_path.is_some() {
            self.save()?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.read().unwrap().iter().map(|e| e.name()).collect()
    }

    /// Descriptors in registration order.
    pub fn descriptors(&self) -> Vec<DatasetDescriptor> {
        self.entries.read().unwrap().iter().map(|e| e.descriptor.lock().unwrap().clone()).collect()
    }

    /// Canonical registered name for `name`: exact match, else a unique
    /// case-insensitive match.
    pub fn resolve_name(&self, name: &str) -> Option<String> {
        let names = self.names();
        if names.iter().any(|n| n == name) {
            return Some(name.to_string());
        }
        let mut hits = names.into_iter().filter(|n| n.eq_ignore_ascii_case(name));
        match (hits.next(), hits.next()) {
            (Some(n), None) => Some(n),
            _ => None,
        }
    }

    pub fn descriptor(&self, name: &str) -> Result<DatasetDescriptor> {
        let entry = self.entry(name)?;
        let d = entry.descriptor.lock().unwrap().clone();
        Ok(d)
    }

    /// The table registered as `name`, reading its source on first use.
    pub fn table(&self, name: &str) -> Result<Arc<Table>> {
        let entry = self.entry(name)?;
        let mut slot = entry.table.lock().unwrap();
        if let Some(t) = slot.as_ref() {
            return Ok(t.clone());
        }
        let mut descriptor = entry.descriptor.lock().unwrap();
        let source = descriptor
            .source
            .clone()
            .ok_or_else(|| StoreError::Registry(format!("{} has no source", descriptor.name)))?;
        let table = Arc::new(ingest_csv(&source, &descriptor.name, descriptor.declared_schema.as_deref())?);
        descriptor.ingested_at = Some(now());
        *slot = Some(table.clone());
        Ok(table)
    }

    fn entry(&self, name: &str) -> Result<Arc<Entry>> {
        let canonical = self.resolve_name(name).ok_or_else(|| StoreError::UnknownTable(name.to_string()))?;
        let entries = self.entries.read().unwrap();
        Ok(entries.iter().find(|e| e.name() == canonical).cloned().expect("resolved name exists"))
    }
}

fn check_new(entries: &[Arc<Entry>], name: &str, description: &str) -> Result<()> {
    if name.trim().is_empty() {
        return Err(StoreError::Registry("dataset name is empty".into()));
    }
    if description.trim().is_empty() {
        return Err(StoreError::Registry(format!("dataset {name} needs a non-empty description")));
    }
    if entries.iter().any(|e| e.name() == name) {
        return Err(StoreError::Registry(format!("dataset {name} is already registered")));
    }
    Ok(())
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{Value, ValueKind};

    fn tiny(name: &str) -> Table {
        Table::from_rows(name, vec![ColumnSpec::new("a", ValueKind::Int)], vec![vec![Value::Int(1)]]).unwrap()
    }

    #[test]
    fn register_and_duplicates() {
        let reg = Registry::new();
        let d =
            reg.register(tiny("ProthomAlo"), "curated collection of rape incidents reported in Prothom Alo").unwrap();
        assert_eq!(d.name, "ProthomAlo");
        assert!(matches!(reg.register(tiny("ProthomAlo"), "again"), Err(StoreError::Registry(_))));
        assert!(matches!(reg.register(tiny("Other"), "   "), Err(StoreError::Registry(_))));
        assert_eq!(reg.table("prothomalo").unwrap().row_count(), 1);
        assert!(matches!(reg.table("missing"), Err(StoreError::UnknownTable(_))));
    }

    #[test]
    fn manifest_round_trip_with_lazy_load() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("t.csv");
        std::fs::write(&csv, "a,b\n1,x\n2,y\n").unwrap();
        let manifest = dir.path().join("manifest.json");
        {
            let reg = Registry::open(&manifest).unwrap();
            assert!(reg.is_empty());
            reg.register_csv("t", &csv, "two rows", None).unwrap();
        }
        let text = std::fs::read_to_string(&manifest).unwrap();
        assert!(text.contains("\"csv_path\": \"t.csv\""), "{text}");

        let reg = Registry::open(&manifest).unwrap();
        assert_eq!(reg.descriptor("t").unwrap().ingested_at, None);
        assert_eq!(reg.table("t").unwrap().row_count(), 2);
        assert!(reg.descriptor("t").unwrap().ingested_at.is_some());
    }

    #[test]
    fn concurrent_readers() {
        let reg = Arc::new(Registry::new());
        reg.register(tiny("t"), "d").unwrap();
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let reg = reg.clone();
                std::thread::spawn(move || reg.table("t").unwrap().row_count())
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), 1);
        }
    }
}
