use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::runner::SummaryRow;

/// First token of the comment line that opens a summary file.
pub const SUMMARY_TAG: &str = "# ringqec-summary v1";

/// `key=value` pairs from the opening comment line.
pub type SummaryMeta = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryFile {
    pub meta: SummaryMeta,
    pub rows: Vec<SummaryRow>,
}

impl SummaryFile {
    /// Exact code states are fitted from the first point on; prepared
    /// product states are not.
    pub fn default_exclude_first(&self) -> bool {
        !self.meta.get("state").is_some_and(|s| s.ends_with('L'))
    }
}

/// One comment line, then `k,time_us,mean_fidelity,stderr,n_runs`.
pub fn write_summary<W: Write>(mut out: W, meta: &SummaryMeta, rows: &[SummaryRow]) -> Result<()> {
    let mut line = SUMMARY_TAG.to_string();
    for (k, v) in meta {
        if k.contains([' ', '=', '\n']) || v.contains([' ', '\n']) {
            return Err(Error::Format(format!("summary metadata {k}={v:?} needs quoting")));
        }
        line.push_str(&format!(" {k}={v}"));
    }
    writeln!(out, "{line}")?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary<R: Read>(input: R) -> Result<SummaryFile> {
    let mut reader = std::io::BufReader::new(input);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let mut meta = SummaryMeta::new();
    let rest: Box<dyn Read> = if let Some(tail) = first.trim_end().strip_prefix(SUMMARY_TAG) {
        for pair in tail.split_whitespace() {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad summary metadata {pair:?}")))?;
            meta.insert(k.into(), v.into());
        }
        Box::new(reader)
    } else if first.starts_with('#') {
        return Err(Error::Format(format!("not a ringqec summary: {:?}", first.trim_end())));
    } else {
        Box::new(std::io::Cursor::new(first.into_bytes()).chain(reader))
    };
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(rest);
    let rows = r.deserialize().collect::<std::result::Result<Vec<SummaryRow>, _>>()?;
    if rows.is_empty() {
        return Err(Error::Format("summary has no rows".into()));
    }
    Ok(SummaryFile { meta, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let rows = vec![
            SummaryRow {
                k: 1,
                time_us: 0.84,
                mean_fidelity: 0.99,
                stderr: 0.001,
                n_runs: 10,
            },
            SummaryRow {
                k: 2,
                time_us: 1.68,
                mean_fidelity: 0.98,
                stderr: 0.0,
                n_runs: 10,
            },
        ];
        let meta: SummaryMeta = [("state".to_string(), "0L".to_string())].into();
        let mut buf = Vec::new();
        write_summary(&mut buf, &meta, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# ringqec-summary v1 state=0L\nk,time_us,mean_fidelity,stderr,n_runs\n"));
        let back = read_summary(buf.as_slice()).unwrap();
        assert_eq!(back.rows, rows);
        assert!(!back.default_exclude_first());
        let plain = read_summary("k,time_us,mean_fidelity,stderr,n_runs\n1,1.0,0.9,0.0,1\n".as_bytes()).unwrap();
        assert!(plain.meta.is_empty() && plain.default_exclude_first());
        assert!(read_summary("k,time_us\n1,x\n".as_bytes()).is_err());
    }
}
