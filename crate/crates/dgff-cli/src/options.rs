//! Option resolution: command-line flags override config-file values, which
//! override defaults. The fully resolved options serialize to the manifest's
//! config map, and can be rebuilt from one for `--replay`.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use dgff::lattice::Vertex;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug)]
pub enum CliError {
    /// exit code 2
    Usage(String),
    /// exit code 3
    Resource(String),
    /// exit code 1
    Failure(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Resource(m) => write!(f, "resource limit: {m}"),
            CliError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl From<dgff::Error> for CliError {
    fn from(e: dgff::Error) -> Self {
        match e {
            dgff::Error::InvalidArgument(m) => CliError::Usage(m),
            dgff::Error::ResourceLimit(m) => CliError::Resource(m),
            dgff::Error::InsufficientData(m) | dgff::Error::Internal(m) => CliError::Failure(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("io error: {e}"))
    }
}

/// Flat key = value config file mirroring the long flag names. `#` starts a
/// comment; blank lines are ignored.
pub fn parse_config_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
            None => {
                return Err(CliError::Usage(format!(
                    "config line {} is not key = value: {line:?}",
                    lineno + 1
                )))
            }
        }
    }
    Ok(map)
}

/// Resolved options as a string map; the single source for the manifest and
/// for replay.
#[derive(Debug, Clone, Default)]
pub struct OptMap(pub BTreeMap<String, String>);

impl OptMap {
    pub fn set(&mut self, key: &str, value: impl Display) {
        self.0.insert(key.to_string(), value.to_string());
    }

    pub fn set_opt(&mut self, key: &str, value: Option<impl Display>) {
        if let Some(v) = value {
            self.set(key, v);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|s| s.as_str())
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Usage(format!("cannot parse --{key} value {raw:?}"))
            }),
        }
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> CliResult<T> {
        self.parse(key)?
            .ok_or_else(|| CliError::Usage(format!("missing required option --{key}")))
    }
}

/// "lo:hi:step" → inclusive grid.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "grid must be lo:hi:step, got {spec:?}"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid lo {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid hi {:?}", parts[1])))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad grid step {:?}", parts[2])))?;
    if !(step > 0.0) || hi < lo {
        return Err(CliError::Usage(format!("degenerate grid {spec:?}")));
    }
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let x = lo + k as f64 * step;
        if x > hi + 1e-12 {
            break;
        }
        grid.push(x);
        k += 1;
    }
    Ok(grid)
}

/// "lo:hi" window.
pub fn parse_window(spec: &str) -> CliResult<(f64, f64)> {
    let (lo, hi) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("window must be lo:hi, got {spec:?}")))?;
    let lo: f64 = lo
        .parse()
        .map_err(|_| CliError::Usage(format!("bad window lo {lo:?}")))?;
    let hi: f64 = hi
        .parse()
        .map_err(|_| CliError::Usage(format!("bad window hi {hi:?}")))?;
    if hi <= lo {
        return Err(CliError::Usage(format!("empty window {spec:?}")));
    }
    Ok((lo, hi))
}

/// Vertex spec: "center" (resolved against box side n) or "x,y".
pub fn parse_vertex(spec: &str, n: i32) -> CliResult<Vertex> {
    if spec == "center" {
        return Ok(Vertex::new(n / 2, n / 2));
    }
    let (x, y) = spec
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("vertex must be x,y or center, got {spec:?}")))?;
    let x: i32 = x
        .parse()
        .map_err(|_| CliError::Usage(format!("bad vertex x {x:?}")))?;
    let y: i32 = y
        .parse()
        .map_err(|_| CliError::Usage(format!("bad vertex y {y:?}")))?;
    Ok(Vertex::new(x, y))
}

/// Pair list: items "a:b" separated by ';', each side a vertex spec.
pub fn parse_pairs(spec: &str, n: i32) -> CliResult<Vec<(Vertex, Vertex)>> {
    let mut pairs = Vec::new();
    for item in spec.split(';').filter(|s| !s.is_empty()) {
        let (a, b) = item
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("pair must be a:b, got {item:?}")))?;
        pairs.push((parse_vertex(a, n)?, parse_vertex(b, n)?));
    }
    if pairs.is_empty() {
        return Err(CliError::Usage("no pairs given".into()));
    }
    Ok(pairs)
}

/// Fixed numeric formatting for CSV output: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
