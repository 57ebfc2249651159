//! JSON-lines point files and JSON matroid configurations.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::point::{MetricKind, Point};

/// Matroid description as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatroidConfig {
    Partition { quotas: BTreeMap<String, usize> },
    Transversal { categories: Vec<String> },
}

impl MatroidConfig {
    pub fn to_matroid(&self) -> Result<Matroid> {
        match self {
            MatroidConfig::Partition { quotas } => {
                if quotas.is_empty() {
                    return Err(Error::input("partition matroid needs at least one category"));
                }
                Ok(Matroid::partition(quotas.iter().map(|(c, &q)| (c.clone(), q))))
            }
            MatroidConfig::Transversal { categories } => {
                if categories.is_empty() {
                    return Err(Error::input("transversal matroid needs at least one category"));
                }
                let mut seen = std::collections::HashSet::new();
                if let Some(dup) = categories.iter().find(|c| !seen.insert(c.as_str())) {
                    return Err(Error::input(format!("duplicate category {dup:?} in matroid config")));
                }
                Ok(Matroid::transversal(categories.iter().cloned()))
            }
        }
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

/// Streams points from a JSON-lines source, one object per line. Blank
/// lines are skipped; errors carry the 1-based line number.
pub struct PointReader<R> {
    lines: std::io::Lines<R>,
    line: usize,
    source: String,
}

impl<R: BufRead> PointReader<R> {
    pub fn new(reader: R, source: impl Into<String>) -> Self {
        PointReader {
            lines: reader.lines(),
            line: 0,
            source: source.into(),
        }
    }
}

impl PointReader<BufReader<File>> {
    pub fn open(path: &Path) -> Result<Self> {
        Ok(PointReader::new(BufReader::new(open(path)?), path.display().to_string()))
    }
}

impl<R: BufRead> Iterator for PointReader<R> {
    type Item = Result<Point>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = self.lines.next()?;
            self.line += 1;
            let line = match line {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            if line.trim().is_empty() {
                continue;
            }
            return Some(serde_json::from_str::<Point>(&line).map_err(|e| {
                Error::input(format!("{} line {}: {e}", self.source, self.line))
            }));
        }
    }
}

pub fn read_points(path: &Path) -> Result<Vec<Point>> {
    PointReader::open(path)?.collect()
}

pub fn load_dataset(path: &Path, metric: MetricKind) -> Result<Dataset> {
    Dataset::new(read_points(path)?, metric)
}

pub fn read_matroid_config(path: &Path) -> Result<MatroidConfig> {
    serde_json::from_reader(BufReader::new(open(path)?))
        .map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

pub fn load_matroid(path: &Path) -> Result<Matroid> {
    read_matroid_config(path)?.to_matroid()
}

/// Loads a point file and a matroid file, checking every point against the
/// matroid.
pub fn ingest(points: &Path, matroid: &Path, metric: MetricKind) -> Result<(Dataset, Matroid)> {
    let d = load_dataset(points, metric)?;
    let m = load_matroid(matroid)?;
    m.bind(&d)?;
    Ok((d, m))
}

pub fn write_points<'a>(w: impl Write, points: impl IntoIterator<Item = &'a Point>) -> Result<()> {
    let mut w = BufWriter::new(w);
    for p in points {
        serde_json::to_writer(&mut w, p).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_matroid_config(w: impl Write, cfg: &MatroidConfig) -> Result<()> {
    let mut w = BufWriter::new(w);
    serde_json::to_writer_pretty(&mut w, cfg).map_err(std::io::Error::from)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn reads_lines() {
        let src = "{\"id\":\"a\",\"vector\":[1,0],\"categories\":[\"x\"]}\n\n\
                   {\"id\":\"b\",\"vector\":[0,1],\"categories\":[\"y\",\"x\"]}\n";
        let pts: Vec<Point> = PointReader::new(Cursor::new(src), "mem").collect::<Result<_>>().unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].categories(), ["y", "x"]);
    }

    #[test]
    fn bad_line_is_numbered() {
        let src = "{\"id\":\"a\",\"vector\":[1],\"categories\":[\"x\"]}\n{\"id\":\"b\"}\n";
        let err = PointReader::new(Cursor::new(src), "mem")
            .collect::<Result<Vec<_>>>()
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
        let src = "{\"id\":\"a\",\"vector\":[],\"categories\":[\"x\"]}\n";
        assert!(PointReader::new(Cursor::new(src), "mem").next().unwrap().is_err());
    }

    #[test]
    fn matroid_configs() {
        let p: MatroidConfig = serde_json::from_str(r#"{"type":"partition","quotas":{"a":2,"b":1}}"#).unwrap();
        assert_eq!(p.to_matroid().unwrap().quotas().unwrap(), vec![("a", 2), ("b", 1)]);
        let t: MatroidConfig = serde_json::from_str(r#"{"type":"transversal","categories":["a","b"]}"#).unwrap();
        assert_eq!(t.to_matroid().unwrap().labels(), ["a", "b"]);
        assert!(serde_json::from_str::<MatroidConfig>(r#"{"type":"graphic"}"#).is_err());
        let dup: MatroidConfig = serde_json::from_str(r#"{"type":"transversal","categories":["a","a"]}"#).unwrap();
        assert!(dup.to_matroid().is_err());
    }

    #[test]
    fn round_trip_files() {
        let dir = tempfile::tempdir().unwrap();
        let pts = vec![
            Point::new("a", vec![1.0, 2.0], ["x"]).unwrap(),
            Point::new("b", vec![2.0, 0.5], ["y"]).unwrap(),
            Point::new("c", vec![0.0, 1.0], ["x"]).unwrap(),
        ];
        let pp = dir.path().join("p.jsonl");
        let mp = dir.path().join("m.json");
        write_points(File::create(&pp).unwrap(), &pts).unwrap();
        let cfg = MatroidConfig::Partition {
            quotas: [("x".to_string(), 1), ("y".to_string(), 1)].into(),
        };
        write_matroid_config(File::create(&mp).unwrap(), &cfg).unwrap();
        let (d, m) = ingest(&pp, &mp, MetricKind::Euclidean).unwrap();
        assert_eq!(d.points(), &pts[..]);
        assert_eq!(read_matroid_config(&mp).unwrap(), cfg);
        assert_eq!(m.bind(&d).unwrap().rank().rank, 2);

        let other = MatroidConfig::Partition {
            quotas: [("z".to_string(), 1)].into(),
        };
        write_matroid_config(File::create(&mp).unwrap(), &other).unwrap();
        let err = ingest(&pp, &mp, MetricKind::Euclidean).unwrap_err().to_string();
        assert!(err.contains("\"a\""), "{err}");
    }

    #[test]
    fn duplicate_ids_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let pp = dir.path().join("p.jsonl");
        std::fs::write(
            &pp,
            "{\"id\":\"a\",\"vector\":[1],\"categories\":[\"x\"]}\n{\"id\":\"a\",\"vector\":[2],\"categories\":[\"x\"]}\n",
        )
        .unwrap();
        let err = load_dataset(&pp, MetricKind::Euclidean).unwrap_err().to_string();
        assert!(err.contains("\"a\""), "{err}");
    }
}
