//! Input parsing and artifact writing.

use std::fs;
use std::io::Write;
use std::path::Path;

use robust_stream::graph::Edge;

use crate::error::{bad_input, io_error, CliResult};

/// Rows of a numeric CSV file. A first line that does not parse as numbers is
/// taken as a header; `#` starts a comment line.
pub fn read_rows(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad_input(path, e.to_string()))?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad_input(path, e.to_string()))?;
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => {
                if let Some(bad) = row.iter().find(|x| !x.is_finite()) {
                    return Err(bad_input(path, format!("record {}: non-finite value {bad}", i + 1)));
                }
                rows.push(row);
            }
            Err(_) if i == 0 => continue,
            Err(e) => return Err(bad_input(path, format!("record {}: {e}", i + 1))),
        }
    }
    Ok(rows)
}

/// Contents of an edge list: optional `n m_bound` header, then `u v [w]` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFile {
    pub header: Option<(usize, usize)>,
    pub edges: Vec<Edge>,
}

impl EdgeFile {
    /// One more than the largest endpoint.
    pub fn span(&self) -> usize {
        self.edges.iter().map(|e| e.u.max(e.v) + 1).max().unwrap_or(0)
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty())
}

fn parse_header(tokens: &[&str]) -> Option<(usize, usize)> {
    match tokens {
        [n, m] => Some((n.parse().ok()?, m.parse().ok()?)),
        _ => None,
    }
}

/// Header of an edge file, if its first data line has exactly two fields.
pub fn peek_edge_header(path: &Path) -> CliResult<Option<(usize, usize)>> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let header = data_lines(&text).next().and_then(|(_, t)| parse_header(&t));
    Ok(header)
}

pub fn read_edges(path: &Path) -> CliResult<EdgeFile> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut header = None;
    let mut edges = Vec::new();
    for (k, (line, tokens)) in data_lines(&text).enumerate() {
        if k == 0 {
            if let Some(h) = parse_header(&tokens) {
                header = Some(h);
                continue;
            }
        }
        let (u, v, w) = match tokens.as_slice() {
            [u, v] => (*u, *v, "1"),
            [u, v, w] => (*u, *v, *w),
            _ => return Err(bad_input(path, format!("line {line}: expected `u v [w]`"))),
        };
        let parse_err = |what: &str| bad_input(path, format!("line {line}: bad {what}"));
        let u: usize = u.parse().map_err(|_| parse_err("endpoint"))?;
        let v: usize = v.parse().map_err(|_| parse_err("endpoint"))?;
        let w: f64 = w.parse().map_err(|_| parse_err("weight"))?;
        let e = Edge::new(u, v, w).map_err(|e| bad_input(path, format!("line {line}: {e}")))?;
        edges.push(e);
    }
    Ok(EdgeFile { header, edges })
}

/// Writes a file, creating its parent directory.
pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| io_error(path, e))?;
    f.write_all(bytes).map_err(|e| io_error(path, e))
}

/// Numbers in artifacts carry 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV of rows with the given header; every cell is a float.
pub fn write_table(path: &Path, header: &[String], rows: &[Vec<f64>]) -> CliResult<()> {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

/// Edge list with an `n m` header line.
pub fn write_edges(path: &Path, n: usize, edges: &[(usize, usize, f64)]) -> CliResult<()> {
    let mut out = format!("{n} {}\n", edges.len());
    for (u, v, w) in edges {
        out.push_str(&format!("{u} {v} {}\n", fmt_f64(*w)));
    }
    write_file(path, out.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_skip_header_and_comments() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        fs::write(&p, "x,y\n# note\n1, 2\n3,4.5\n").unwrap();
        assert_eq!(read_rows(&p).unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.5]]);
        fs::write(&p, "1,2\n3\n").unwrap();
        assert!(read_rows(&p).is_err());
        fs::write(&p, "1,2\nx,4\n").unwrap();
        assert!(read_rows(&p).is_err());
        fs::write(&p, "").unwrap();
        assert!(read_rows(&p).unwrap().is_empty());
    }

    #[test]
    fn edges_with_and_without_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.txt");
        fs::write(&p, "4 10\n0 1 2.5\n1 3\n").unwrap();
        let f = read_edges(&p).unwrap();
        assert_eq!(f.header, Some((4, 10)));
        assert_eq!(f.edges.len(), 2);
        assert_eq!(f.edges[1].w, 1.0);
        assert_eq!(peek_edge_header(&p).unwrap(), Some((4, 10)));
        fs::write(&p, "0 1 1\n2 5 3\n").unwrap();
        let f = read_edges(&p).unwrap();
        assert_eq!(f.header, None);
        assert_eq!(f.span(), 6);
        fs::write(&p, "0 0 1\n").unwrap();
        assert!(read_edges(&p).is_err());
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        let s = fmt_f64(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(s.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    }
}
