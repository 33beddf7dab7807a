//! Text formats for codebooks, generator matrices and ModCod tables.
//!
//! Codebook file:
//!
//! ```text
//! # plh-codebook v1 N=<entries>
//! <modcod_id>,<length>,<codeword hex, MSB first, zero padded>
//! ```
//!
//! Generator matrix file:
//!
//! ```text
//! # plh-genmatrix v1 K=<rows> V=<columns>
//! <row 0 as 0/1 characters>
//! ...
//! ```
//!
//! ModCod table: CSV with header `modcod_id,m,threshold_db,plh_length,synthetic`.

use std::fmt::Write as _;

use crate::bits::Bits;
use crate::code::GeneratorMatrix;
use crate::codebook::{ModCodEntry, ModCodTable, PlhCodebook};
use crate::error::{Error, Result};

/// Upper bound on entries, rows or columns accepted from a file.
pub const MAX_FILE_ITEMS: usize = 1 << 16;

const CODEBOOK_MAGIC: &str = "# plh-codebook v1";
const GENMATRIX_MAGIC: &str = "# plh-genmatrix v1";
pub const MODCOD_TABLE_HEADER: [&str; 5] = ["modcod_id", "m", "threshold_db", "plh_length", "synthetic"];

/// Parses `KEY=value` fields after the magic prefix of a header line.
fn header_fields<'a>(line: &'a str, magic: &str, keys: &[&str]) -> Result<Vec<usize>> {
    let rest = line
        .strip_prefix(magic)
        .ok_or_else(|| Error::parse(1, format!("expected header '{magic} ...'")))?;
    let fields: Vec<&'a str> = rest.split_whitespace().collect();
    if fields.len() != keys.len() {
        return Err(Error::parse(1, format!("header needs fields {keys:?}")));
    }
    keys.iter()
        .zip(fields)
        .map(|(key, f)| {
            let value = f
                .strip_prefix(key)
                .and_then(|f| f.strip_prefix('='))
                .ok_or_else(|| Error::parse(1, format!("expected {key}=<n>, got '{f}'")))?;
            let n: usize = value
                .parse()
                .map_err(|_| Error::parse(1, format!("bad {key} value '{value}'")))?;
            if n > MAX_FILE_ITEMS {
                return Err(Error::parse(1, format!("{key}={n} exceeds {MAX_FILE_ITEMS}")));
            }
            Ok(n)
        })
        .collect()
}

/// Nonblank lines with their 1-based line numbers, header excluded.
fn body_lines(text: &str) -> Result<(&str, Vec<(usize, &str)>)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let body = lines.filter(|(_, l)| !l.is_empty()).collect();
    Ok((header, body))
}

pub fn parse_codebook(text: &str) -> Result<PlhCodebook> {
    let (header, body) = body_lines(text)?;
    let n = header_fields(header, CODEBOOK_MAGIC, &["N"])?[0];
    if body.len() != n {
        return Err(Error::parse(
            1,
            format!("header says N={n}, found {} entries", body.len()),
        ));
    }
    let mut words = Vec::with_capacity(n);
    for (line, l) in body {
        let parts: Vec<&str> = l.split(',').map(str::trim).collect();
        let [id, len, hex] = parts[..] else {
            return Err(Error::parse(line, "expected modcod_id,length,hex"));
        };
        let id: u32 = id.parse().map_err(|_| Error::parse(line, format!("bad id '{id}'")))?;
        let len: usize = len
            .parse()
            .map_err(|_| Error::parse(line, format!("bad length '{len}'")))?;
        if len == 0 || len > MAX_FILE_ITEMS {
            return Err(Error::parse(line, format!("length {len} out of range")));
        }
        let bits = Bits::from_hex(hex, len).map_err(|e| Error::parse(line, e.to_string()))?;
        words.push((id, bits));
    }
    PlhCodebook::new(words)
}

pub fn write_codebook(codebook: &PlhCodebook) -> String {
    let mut out = format!("{CODEBOOK_MAGIC} N={}\n", codebook.n());
    for e in codebook.entries() {
        let _ = writeln!(out, "{},{},{}", e.modcod_id, e.len(), e.bits.to_hex());
    }
    out
}

pub fn parse_generator_matrix(text: &str) -> Result<GeneratorMatrix> {
    let (header, body) = body_lines(text)?;
    let dims = header_fields(header, GENMATRIX_MAGIC, &["K", "V"])?;
    let (k, v) = (dims[0], dims[1]);
    if body.len() != k {
        return Err(Error::parse(1, format!("header says K={k}, found {} rows", body.len())));
    }
    let rows = body
        .into_iter()
        .map(|(line, l)| {
            let row: Bits = l.parse().map_err(|e: Error| Error::parse(line, e.to_string()))?;
            if row.len() != v {
                return Err(Error::parse(
                    line,
                    format!("row has {} columns, header says V={v}", row.len()),
                ));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    GeneratorMatrix::from_rows(&rows)
}

pub fn write_generator_matrix(g: &GeneratorMatrix) -> String {
    let mut out = format!("{GENMATRIX_MAGIC} K={} V={}\n", g.k(), g.v());
    for row in g.rows() {
        let _ = writeln!(out, "{row}");
    }
    out
}

pub fn parse_modcod_table(text: &str) -> Result<ModCodTable> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| Error::parse(1, e.to_string()))?;
    if headers.iter().ne(MODCOD_TABLE_HEADER) {
        return Err(Error::parse(
            1,
            format!("header must be {}", MODCOD_TABLE_HEADER.join(",")),
        ));
    }
    let mut entries = Vec::new();
    for (i, rec) in r.deserialize::<ModCodEntry>().enumerate() {
        if i >= MAX_FILE_ITEMS {
            return Err(Error::parse(i + 2, "too many rows"));
        }
        entries.push(rec.map_err(|e| Error::parse(i + 2, e.to_string()))?);
    }
    ModCodTable::new(entries)
}

pub fn write_modcod_table(table: &ModCodTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for e in table.entries() {
        w.serialize(e).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::grow_code;
    use crate::codebook::default_codebooks;
    use proptest::prelude::*;

    #[test]
    fn codebook_round_trip() {
        let (_, cb, fixed) = default_codebooks();
        for c in [cb, fixed] {
            let text = write_codebook(&c);
            assert!(text.starts_with("# plh-codebook v1 N=39\n"));
            assert_eq!(parse_codebook(&text).unwrap(), c);
        }
    }

    #[test]
    fn codebook_errors() {
        assert!(parse_codebook("").is_err());
        assert!(parse_codebook("# plh-codebook v1 N=2\n1,4,0\n").is_err());
        assert!(matches!(
            parse_codebook("# plh-codebook v1 N=1\n1,4,g\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        // complementary words of one length
        assert!(matches!(
            parse_codebook("# plh-codebook v1 N=2\n1,4,0\n2,4,f\n"),
            Err(Error::InvariantViolation(_))
        ));
        let ok = parse_codebook("# plh-codebook v1 N=2\n\n1,4,0\n2,2,4\n").unwrap();
        assert_eq!(ok.get(2).unwrap().bits.to_string(), "01");
    }

    #[test]
    fn generator_matrix_round_trip() {
        let g = grow_code(6, 64, 1).unwrap();
        let text = write_generator_matrix(&g);
        assert!(text.starts_with("# plh-genmatrix v1 K=6 V=64\n"));
        assert_eq!(parse_generator_matrix(&text).unwrap(), g);
        assert!(parse_generator_matrix("# plh-genmatrix v1 K=2 V=3\n101\n01\n").is_err());
        assert!(parse_generator_matrix("# plh-genmatrix v1 K=2 V=2\n11\n11\n").is_err());
        assert!(parse_generator_matrix("# plh-genmatrix v1 V=2 K=2\n10\n01\n").is_err());
    }

    #[test]
    fn modcod_table_round_trip() {
        let t = ModCodTable::dvb_s2x_default();
        let text = write_modcod_table(&t);
        assert!(text.starts_with("modcod_id,m,threshold_db,plh_length,synthetic\n"));
        assert_eq!(parse_modcod_table(&text).unwrap(), t);
        assert!(parse_modcod_table("id,m\n1,4\n").is_err());
        assert!(parse_modcod_table("modcod_id,m,threshold_db,plh_length,synthetic\n2,4,1.0,26,false\n").is_err());
        assert!(parse_modcod_table("modcod_id,m,threshold_db,plh_length,synthetic\n1,4,x,26,false\n").is_err());
    }

    proptest! {
        #[test]
        fn parsers_never_panic(s in "\\PC{0,200}") {
            let _ = parse_codebook(&s);
            let _ = parse_generator_matrix(&s);
            let _ = parse_modcod_table(&s);
        }

        #[test]
        fn parsers_never_panic_near_valid(body in "[0-9a-fA-F,\\n]{0,120}", n in 0usize..5) {
            let _ = parse_codebook(&format!("# plh-codebook v1 N={n}\n{body}"));
            let _ = parse_generator_matrix(&format!("# plh-genmatrix v1 K={n} V=3\n{body}"));
        }
    }
}
