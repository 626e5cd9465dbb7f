use std::collections::BTreeMap;

use serde_json::Value as Json;

use super::{Result, VizError};

/// Region polygons keyed by id. Each region is a list of closed rings of
/// `(lon, lat)` points; holes are drawn with the even-odd rule.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGeometry {
    pub regions: BTreeMap<String, Vec<Vec<(f64, f64)>>>,
}

impl RegionGeometry {
    /// Reads a GeoJSON FeatureCollection of Polygon / MultiPolygon features,
    /// keyed by the string (or number) property `id_property`.
    pub fn from_geojson(text: &str, id_property: &str) -> Result<RegionGeometry> {
        let doc: Json = serde_json::from_str(text).map_err(|e| VizError::Geometry(e.to_string()))?;
        if doc.get("type").and_then(Json::as_str) != Some("FeatureCollection") {
            return Err(VizError::Geometry("expected a FeatureCollection".into()));
        }
        let features = doc
            .get("features")
            .and_then(Json::as_array)
            .ok_or_else(|| VizError::Geometry("FeatureCollection has no features array".into()))?;
        let mut regions = BTreeMap::new();
        for (i, f) in features.iter().enumerate() {
            let id = match f.get("properties").and_then(|p| p.get(id_property)) {
                Some(Json::String(s)) => s.clone(),
                Some(Json::Number(n)) => n.to_string(),
                _ => return Err(VizError::Geometry(format!("feature {i} has no `{id_property}` property"))),
            };
            let geom = f.get("geometry").ok_or_else(|| VizError::Geometry(format!("feature {id} has no geometry")))?;
            let coords = geom
                .get("coordinates")
                .ok_or_else(|| VizError::Geometry(format!("feature {id} has no coordinates")))?;
            let polygons: Vec<&Json> = match geom.get("type").and_then(Json::as_str) {
                Some("Polygon") => vec![coords],
                Some("MultiPolygon") => coords.as_array().map(|a| a.iter().collect()).unwrap_or_default(),
                other => return Err(VizError::Geometry(format!("feature {id}: unsupported geometry {other:?}"))),
            };
            let mut rings = Vec::new();
            for poly in polygons {
                for ring in poly.as_array().ok_or_else(|| VizError::Geometry(format!("feature {id}: bad polygon")))? {
                    rings.push(parse_ring(ring).map_err(|m| VizError::Geometry(format!("feature {id}: {m}")))?);
                }
            }
            if regions.insert(id.clone(), rings).is_some() {
                return Err(VizError::Geometry(format!("duplicate region id {id:?}")));
            }
        }
        Ok(RegionGeometry { regions })
    }

    /// `(min_lon, min_lat, max_lon, max_lat)` over every ring.
    pub fn bounds(&self) -> Option<(f64, f64, f64, f64)> {
        let mut pts = self.regions.values().flatten().flatten();
        let first = *pts.next()?;
        Some(
            pts.fold((first.0, first.1, first.0, first.1), |b, &(x, y)| {
                (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y))
            }),
        )
    }
}

/// A ring must have at least three distinct points; an open ring is closed.
fn parse_ring(ring: &Json) -> std::result::Result<Vec<(f64, f64)>, String> {
    let pts = ring.as_array().ok_or("ring is not an array")?;
    let mut out = Vec::with_capacity(pts.len() + 1);
    for p in pts {
        let xy = p.as_array().ok_or("position is not an array")?;
        match (xy.first().and_then(Json::as_f64), xy.get(1).and_then(Json::as_f64)) {
            (Some(x), Some(y)) if x.is_finite() && y.is_finite() => out.push((x, y)),
            _ => return Err("position needs numeric lon and lat".into()),
        }
    }
    if out.first() != out.last() {
        out.push(out[0]);
    }
    if out.len() < 4 {
        return Err("ring needs at least three points".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_closes_rings() {
        let text = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"name":"A"},"geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1]]]}},
            {"type":"Feature","properties":{"name":"B"},"geometry":{"type":"MultiPolygon","coordinates":[[[[2,0],[3,0],[3,1],[2,0]]]]}}
        ]}"#;
        let g = RegionGeometry::from_geojson(text, "name").unwrap();
        assert_eq!(g.regions["A"][0].len(), 5);
        assert_eq!(g.regions["A"][0].first(), g.regions["A"][0].last());
        assert_eq!(g.bounds(), Some((0.0, 0.0, 3.0, 1.0)));
        assert!(RegionGeometry::from_geojson(text, "id").is_err());
    }
}
