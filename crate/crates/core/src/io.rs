//! JSON inputs and CSV outputs.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::bm::IntervalFamily;
use crate::clark::AtomicMeasure;
use crate::debranges::HBFunction;
use crate::error::{Error, Result};
use crate::inner::{MifDescriptor, ZeroGenerator, ZeroRule};
use crate::model::RationalInner;

/// Parse JSON text; any mismatch is a schema error.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn schema<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Schema(m) => Error::Schema(format!("{}: {m}", path.display())),
        other => Error::Schema(format!("{}: {other}", path.display())),
    })
}

/// Inner function: `{"zeros": [[re,im],...], "exp_mass": a, "rotation": [re,im]}`.
///
/// A `generator` entry may name a rule with its parameters inline, e.g.
/// `{"name": "example3_J", "C": 10, "n": 500}` for the indices `|k| ≤ n`,
/// or use an explicit `"window": [lo, hi]`.
pub fn parse_mif(text: &str) -> Result<MifDescriptor> {
    let mut v: serde_json::Value = parse_json(text)?;
    if let Some(g) = v.get_mut("generator") {
        if let Some(obj) = g.as_object().filter(|o| o.contains_key("name")) {
            *g = serde_json::to_value(external_generator(obj)?).map_err(|e| Error::Schema(e.to_string()))?;
        }
    }
    let d: MifDescriptor = serde_json::from_value(v).map_err(|e| Error::Schema(e.to_string()))?;
    d.validate().map_err(|e| Error::Schema(e.to_string()))?;
    Ok(d)
}

fn external_generator(obj: &serde_json::Map<String, serde_json::Value>) -> Result<ZeroGenerator> {
    let name = obj["name"].as_str().ok_or_else(|| Error::Schema("generator name must be a string".into()))?;
    let rule = ZeroRule::from_name(name, obj).map_err(|e| Error::Schema(e.to_string()))?;
    let window = match (obj.get("window"), obj.get("n")) {
        (Some(w), _) => {
            serde_json::from_value::<[i64; 2]>(w.clone()).map_err(|e| Error::Schema(format!("window: {e}")))?
        }
        (None, Some(n)) => {
            let n = n.as_i64().ok_or_else(|| Error::Schema("n must be an integer".into()))?;
            [-n, n]
        }
        (None, None) => [-100, 100],
    };
    ZeroGenerator::new(rule, window).map_err(|e| Error::Schema(e.to_string()))
}

pub fn load_mif(path: &Path) -> Result<MifDescriptor> {
    schema(path, parse_mif(&read(path)?))
}

/// Rational inner function: `{"zeros": [[re,im],...], "rotation": [re,im]}`.
pub fn load_rational(path: &Path) -> Result<RationalInner> {
    let r: RationalInner = schema(path, parse_json(&read(path)?))?;
    schema(path, r.validate())?;
    Ok(r)
}

/// Interval family: `{"intervals": [[l, r], ...], "kappa": κ}` with an optional `"extent"`.
pub fn load_family(path: &Path) -> Result<IntervalFamily> {
    #[derive(serde::Deserialize)]
    struct Raw {
        intervals: Vec<(f64, f64)>,
        #[serde(default)]
        kappa: f64,
        extent: Option<f64>,
    }
    let raw: Raw = schema(path, parse_json(&read(path)?))?;
    let fam = schema(path, IntervalFamily::new(raw.intervals, raw.kappa))?;
    Ok(match raw.extent {
        Some(e) => fam.with_extent(e),
        None => fam,
    })
}

/// HB function: `{"zeros": [[re,im],...], "exp_mass": a, "scalar": [re,im]}`.
pub fn load_hb(path: &Path) -> Result<HBFunction> {
    let e: HBFunction = schema(path, parse_json(&read(path)?))?;
    schema(path, e.validate())?;
    Ok(e)
}

/// Atomic measure: `{"atoms": [{"x":..,"mass":..}], "infinity_mass": p}`; atoms are sorted on load.
pub fn load_measure(path: &Path) -> Result<AtomicMeasure> {
    let mut m: AtomicMeasure = schema(path, parse_json(&read(path)?))?;
    m.atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
    schema(path, m.validate())?;
    Ok(m)
}

/// One real per line; blank lines and `#` comments are skipped.
pub fn parse_sequence(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(k, l)| {
            l.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Schema(format!("line {}: {l:?} is not a real number", k + 1)))
        })
        .collect()
}

pub fn load_sequence(path: &Path) -> Result<Vec<f64>> {
    schema(path, parse_sequence(&read(path)?))
}

/// Named numeric columns of a CSV file with a header row.
pub fn read_columns(path: &Path, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let text = read(path)?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let bad = |m: String| Error::Schema(format!("{}: {m}", path.display()));
    let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let idx = names
        .iter()
        .map(|n| headers.iter().position(|h| h == *n).ok_or_else(|| bad(format!("missing column {n:?}"))))
        .collect::<Result<Vec<usize>>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        for (c, &k) in idx.iter().enumerate() {
            let v = rec.get(k).and_then(|t| t.parse::<f64>().ok()).filter(|v| v.is_finite());
            cols[c]
                .push(v.ok_or_else(|| bad(format!("row {}: column {:?} is not a real number", line + 2, names[c])))?);
        }
    }
    Ok(cols)
}

/// Equal-length columns as CSV with a header row.
pub fn write_columns<W: Write>(out: W, columns: &[(&str, &[f64])]) -> Result<()> {
    let n = columns.first().map_or(0, |c| c.1.len());
    if columns.iter().any(|c| c.1.len() != n) {
        return Err(Error::InvalidInput("CSV columns differ in length".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::InvalidInput(format!("CSV output failed: {e}"));
    w.write_record(columns.iter().map(|c| c.0)).map_err(io)?;
    for k in 0..n {
        w.write_record(columns.iter().map(|c| format!("{:e}", c.1[k]))).map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("CSV output failed: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences() {
        assert_eq!(parse_sequence("1\n# c\n\n2.5 # two\n-3e1\n").unwrap(), vec![1.0, 2.5, -30.0]);
        assert!(matches!(parse_sequence("1\nx\n"), Err(Error::Schema(_))));
    }

    #[test]
    fn csv_columns() {
        let mut buf = Vec::new();
        write_columns(&mut buf, &[("x", &[1.0, 2.0]), ("y", &[0.5, 0.25])]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("x,y\n1e0,5e-1\n"), "{s}");
    }

    #[test]
    fn named_generator() {
        let d = parse_mif(r#"{"generator": {"name": "example3_L", "C": 10, "n": 5}}"#).unwrap();
        assert_eq!(d.materialized().zeros.len(), 10);
        assert!(matches!(parse_mif(r#"{"generator": {"name": "nope"}}"#), Err(Error::Schema(_))));
        assert!(matches!(parse_mif(r#"{"zeros": [[0.0, -1.0]]}"#), Err(Error::Schema(_))));
    }

    #[test]
    fn mif_schema() {
        let d: MifDescriptor = parse_json(r#"{"zeros":[[0.0,1.0]]}"#).unwrap();
        assert_eq!(d.exp_mass, 0.0);
        assert!(matches!(parse_json::<MifDescriptor>(r#"{"zeros":[1.0]}"#), Err(Error::Schema(_))));
    }
}
