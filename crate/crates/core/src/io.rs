//! CSV formats for ciphertext matrices, recovered mappings and result tables.
//!
//! The incidence format has one record per encrypted string and one column
//! per token:
//!
//! ```text
//! # ssleak incidence v1: rows are encrypted strings, columns are tokens
//! ciphertext_id,t101,t245,t877
//! 0,1,0,1
//! 1,0,1,1
//! ```

use std::io::{BufRead, Read, Write};

use crate::attack::{CipherMatrix, MappingState};
use crate::error::{Error, Result};
use crate::eval::RecoveryReport;
use crate::matrix::IncidenceMatrix;
use crate::sse_sim::{CipherId, Token};

pub const INCIDENCE_HEADER: &str =
    "# ssleak incidence v1: rows are encrypted strings, columns are tokens";

pub fn write_incidence_csv<W: Write>(b: &CipherMatrix, mut out: W) -> Result<()> {
    writeln!(out, "{INCIDENCE_HEADER}").map_err(|e| Error::io("<incidence>", e))?;
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = std::iter::once("ciphertext_id".to_string())
        .chain(b.row_labels().iter().map(|t| format!("t{}", t.0)))
        .collect();
    w.write_record(&header)?;
    for (j, es) in b.col_labels().iter().enumerate() {
        let col = b.column(j);
        let record: Vec<String> = std::iter::once(es.0.to_string())
            .chain((0..b.rows()).map(|r| if col.contains(r) { "1" } else { "0" }.to_string()))
            .collect();
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<incidence>", e))?;
    Ok(())
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: "<incidence>".into(),
        line: line as usize,
        message: message.into(),
    }
}

pub fn read_incidence_csv<R: Read>(input: R) -> Result<CipherMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(input);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("ciphertext_id") {
        return Err(parse_err(1, "first column must be ciphertext_id"));
    }
    let tokens = header
        .iter()
        .skip(1)
        .map(|h| {
            h.strip_prefix('t')
                .and_then(|v| v.parse::<u16>().ok())
                .map(Token)
                .ok_or_else(|| parse_err(1, format!("bad token column {h:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ids = Vec::new();
    let mut columns = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != tokens.len() + 1 {
            return Err(parse_err(
                line,
                format!(
                    "expected {} fields, found {}",
                    tokens.len() + 1,
                    record.len()
                ),
            ));
        }
        let id = record[0]
            .parse::<usize>()
            .map_err(|_| parse_err(line, format!("bad ciphertext id {:?}", &record[0])))?;
        let mut ones = Vec::new();
        for (r, v) in record.iter().skip(1).enumerate() {
            match v {
                "1" => ones.push(r),
                "0" => {}
                other => return Err(parse_err(line, format!("cell {other:?} is not 0 or 1"))),
            }
        }
        ids.push(CipherId(id));
        columns.push(ones);
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = ids.iter().find(|id| !seen.insert(**id)) {
        return Err(Error::Invalid(format!("ciphertext {dup} appears twice")));
    }
    IncidenceMatrix::from_column_indices(tokens, ids, &columns)
}

/// Writes `kind,ciphertext_id,plaintext_id` records: `string` rows pair an
/// encrypted string with a known string id, `token` rows a token with a
/// character.
pub fn write_mappings_csv<W: Write>(state: &MappingState, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "ciphertext_id", "plaintext_id"])?;
    for (es, s) in state.col_map() {
        w.write_record(["string", &es.0.to_string(), &s.0.to_string()])?;
    }
    for (t, a) in state.row_map() {
        w.write_record(["token", &t.0.to_string(), &a.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<mappings>", e))?;
    Ok(())
}

/// Reads the format written by [`write_mappings_csv`].
pub fn read_mappings_csv<R: BufRead>(input: R) -> Result<MappingState> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut state = MappingState::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |what: &str| Error::Parse {
            path: "<mappings>".into(),
            line: line as usize,
            message: format!("bad {what}"),
        };
        let inserted = match &record[0] {
            "string" => {
                let es = record[1].parse().map_err(|_| bad("ciphertext id"))?;
                let s = record[2].parse().map_err(|_| bad("string id"))?;
                state.insert_string(CipherId(es), crate::corpus::StringId(s))
            }
            "token" => {
                let t = record[1].parse().map_err(|_| bad("token"))?;
                let mut chars = record[2].chars();
                let (Some(a), None) = (chars.next(), chars.next()) else {
                    return Err(bad("character"));
                };
                state.insert_token(Token(t), a)
            }
            _ => return Err(bad("kind")),
        };
        if !inserted {
            return Err(bad("mapping: duplicate entry"));
        }
    }
    Ok(state)
}

fn pct(rate: f64) -> String {
    format!("{:.2}", rate * 100.0)
}

/// One row per knowledge ratio: counts and percentages for alphabet, string
/// and initial-path recovery.
pub fn write_knowledge_table<W: Write>(rows: &[RecoveryReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "knowledge_pct",
        "alphabet_count",
        "alphabet_pct",
        "string_count",
        "string_pct",
        "initial_path_count",
        "initial_path_pct",
        "mapped_string_count",
        "known_strings",
        "strings_total",
        "alphabet_total",
        "trials",
    ])?;
    for r in rows {
        w.write_record([
            format!("{:.2}", r.knowledge_ratio * 100.0),
            format!("{:.2}", r.alphabet_count),
            pct(r.alphabet_rate),
            format!("{:.2}", r.string_count),
            pct(r.string_rate),
            format!("{:.2}", r.initial_path_count),
            pct(r.initial_path_rate),
            format!("{:.2}", r.mapped_string_count),
            format!("{:.2}", r.known_strings),
            r.strings_total.to_string(),
            r.alphabet_total.to_string(),
            r.trials.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<table>", e))?;
    Ok(())
}

/// Rates as rows and dataset sizes as columns.
pub fn write_scale_table<W: Write>(rows: &[RecoveryReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = std::iter::once("rate_pct".to_string())
        .chain(rows.iter().map(|r| r.strings_total.to_string()))
        .collect();
    w.write_record(&header)?;
    type Metric = (&'static str, fn(&RecoveryReport) -> f64);
    let metrics: [Metric; 3] = [
        ("alphabet", |r| r.alphabet_rate),
        ("string", |r| r.string_rate),
        ("initial_path", |r| r.initial_path_rate),
    ];
    for (name, get) in metrics {
        let record: Vec<String> = std::iter::once(name.to_string())
            .chain(rows.iter().map(|r| pct(get(r))))
            .collect();
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<table>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::StringId;
    use crate::sse_sim::{reduce_to_incidence, EncryptedString};

    fn sample_b() -> CipherMatrix {
        let strings = vec![
            EncryptedString::new(CipherId(0), vec![Token(101), Token(877)]),
            EncryptedString::new(CipherId(1), vec![Token(245), Token(877)]),
            EncryptedString::new(CipherId(2), vec![Token(245)]),
        ];
        reduce_to_incidence(&strings, &[Token(101), Token(245), Token(877)]).unwrap()
    }

    #[test]
    fn incidence_round_trip() {
        let b = sample_b();
        let mut buf = Vec::new();
        write_incidence_csv(&b, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(INCIDENCE_HEADER));
        assert!(text.contains("ciphertext_id,t101,t245,t877\n0,1,0,1\n1,0,1,1\n2,0,1,0\n"));
        assert_eq!(read_incidence_csv(buf.as_slice()).unwrap(), b);
    }

    #[test]
    fn malformed_incidence_is_rejected() {
        for text in [
            "id,t1\n0,1\n",
            "ciphertext_id,x1\n0,1\n",
            "ciphertext_id,t1\n0,2\n",
            "ciphertext_id,t1\n0,1,1\n",
            "ciphertext_id,t1\n0,1\n0,0\n",
        ] {
            assert!(read_incidence_csv(text.as_bytes()).is_err(), "{text:?}");
        }
    }

    #[test]
    fn mappings_round_trip_with_awkward_characters() {
        let mut s = MappingState::new();
        s.insert_string(CipherId(4), StringId(1));
        s.insert_token(Token(300), ',');
        s.insert_token(Token(301), '"');
        let mut buf = Vec::new();
        write_mappings_csv(&s, &mut buf).unwrap();
        assert_eq!(read_mappings_csv(buf.as_slice()).unwrap(), s);
    }

    #[test]
    fn scale_table_layout() {
        let r = RecoveryReport {
            knowledge_ratio: 0.1,
            strings_total: 1000,
            alphabet_total: 50,
            known_strings: 100.0,
            alphabet_count: 25.0,
            alphabet_rate: 0.5,
            string_count: 300.0,
            string_rate: 0.3,
            initial_path_count: 200.0,
            initial_path_rate: 0.2,
            mapped_string_count: 100.0,
            mapped_string_rate: 0.1,
            false_positives: 0.0,
            trials: 1,
        };
        let mut buf = Vec::new();
        write_scale_table(&[r], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "rate_pct,1000\nalphabet,50.00\nstring,30.00\ninitial_path,20.00\n"
        );
    }
}
