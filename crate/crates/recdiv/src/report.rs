//! Report rendering. JSON reports are `{"metadata": .., "result": ..}`; CSV
//! reports start with `# key=value` metadata lines, then a header row.
//! Floats are printed the same way in both, so every CSV number also appears
//! verbatim in the JSON of the same run.

use serde::{Deserialize, Serialize};

/// Bumped whenever a report layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub command: String,
    /// Arguments after the program name, without `--threads` and `--out`.
    pub args: Vec<String>,
    pub seed: Option<u64>,
}

impl Metadata {
    pub fn new(command: &str, args: Vec<String>, seed: Option<u64>) -> Self {
        Metadata {
            tool: "recdiv".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            args,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(Option<f64>),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(Some(v)) => float(*v),
            Cell::Float(None) | Cell::Empty => String::new(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(Some(v))
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<u64>> for Cell {
    fn from(v: Option<u64>) -> Self {
        v.map_or(Cell::Empty, Cell::from)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

/// Shortest round-trip form, identical to the JSON output.
pub fn float(v: f64) -> String {
    serde_json::to_string(&v).expect("finite floats serialize")
}

/// The CSV view of a report: summary notes plus one table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub notes: Vec<(String, Cell)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table {
            header,
            ..Default::default()
        }
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.notes.push((key.into(), value.into()));
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }
}

pub fn render_json<T: Serialize>(meta: &Metadata, result: &T) -> Vec<u8> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        metadata: &'a Metadata,
        result: &'a T,
    }
    let mut out = serde_json::to_vec_pretty(&Doc {
        metadata: meta,
        result,
    })
    .expect("reports serialize");
    out.push(b'\n');
    out
}

pub fn render_csv(meta: &Metadata, table: &Table) -> Vec<u8> {
    let mut out = String::new();
    let mut line = |k: &str, v: String| out.push_str(&format!("# {k}={v}\n"));
    line("tool", meta.tool.clone());
    line("version", meta.version.clone());
    line("schema_version", meta.schema_version.to_string());
    line("command", meta.command.clone());
    line("args", serde_json::to_string(&meta.args).unwrap());
    line("seed", meta.seed.map_or(String::new(), |s| s.to_string()));
    for (k, v) in &table.notes {
        line(k, v.render());
    }
    let mut w = csv::Writer::from_writer(out.into_bytes());
    w.write_record(&table.header).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Pulls the metadata back out of a JSON or CSV report.
pub fn read_metadata(bytes: &[u8]) -> Result<Metadata, String> {
    let text = std::str::from_utf8(bytes).map_err(|e| e.to_string())?;
    if text.trim_start().starts_with('{') {
        #[derive(Deserialize)]
        struct Doc {
            metadata: Metadata,
        }
        let doc: Doc = serde_json::from_str(text).map_err(|e| e.to_string())?;
        return Ok(doc.metadata);
    }
    let get = |key: &str| -> Result<String, String> {
        text.lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.strip_prefix(&format!("# {key}=")))
            .map(str::to_string)
            .ok_or_else(|| format!("no {key} line in the report header"))
    };
    let seed = get("seed")?;
    Ok(Metadata {
        tool: get("tool")?,
        version: get("version")?,
        schema_version: get("schema_version")?.parse().map_err(|_| "bad schema_version")?,
        command: get("command")?,
        args: serde_json::from_str(&get("args")?).map_err(|e| e.to_string())?,
        seed: if seed.is_empty() {
            None
        } else {
            Some(seed.parse().map_err(|_| "bad seed")?)
        },
    })
}
