use crate::error::{Error, Result};

/// A set of visible-layer spin vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub name: String,
    pub datapoints: Vec<Vec<i8>>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, datapoints: Vec<Vec<i8>>) -> Result<Self> {
        let width = datapoints.first().map_or(0, Vec::len);
        for (d, point) in datapoints.iter().enumerate() {
            if point.len() != width {
                return Err(Error::invalid(format!(
                    "datapoint {d} has length {}, expected {width}",
                    point.len()
                )));
            }
            if point.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::invalid(format!("datapoint {d} has a non-±1 entry")));
            }
        }
        Ok(Self {
            name: name.into(),
            datapoints,
        })
    }

    pub fn len(&self) -> usize {
        self.datapoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.datapoints.is_empty()
    }

    pub fn width(&self) -> usize {
        self.datapoints.first().map_or(0, Vec::len)
    }

    /// One datapoint per line, entries as `+1`/`-1` separated by spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for point in &self.datapoints {
            let line: Vec<String> = point.iter().map(|s| format!("{s:+}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(name: &str, text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let point = line
                .split_whitespace()
                .map(|tok| match tok {
                    "1" | "+1" => Ok(1i8),
                    "-1" => Ok(-1i8),
                    other => Err(Error::Format {
                        line: n + 1,
                        message: format!("expected ±1, found {other:?}"),
                    }),
                })
                .collect::<Result<Vec<_>>>()?;
            points.push(point);
        }
        Dataset::new(name, points)
    }
}
