//! CSV emission: `#` provenance lines, a mandatory header, fixed column
//! order and shortest round-trip float formatting.

use std::io::Write;

use crate::error::Result;

/// Shortest decimal that parses back to the same `f64`. Plain notation for
/// moderate magnitudes, scientific otherwise.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e7).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn write_table<W: Write>(
    out: W,
    comments: &[String],
    header: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    let text: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(|v| format_float(*v)).collect())
        .collect();
    write_text_table(out, comments, header, &text)
}

/// Like [`write_table`] for pre-formatted cells.
pub fn write_text_table<W: Write>(
    mut out: W,
    comments: &[String],
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    for c in comments {
        for line in c.lines() {
            if line.is_empty() {
                writeln!(out, "#")?;
            } else {
                writeln!(out, "# {line}")?;
            }
        }
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn table_layout() {
        let mut buf = Vec::new();
        write_table(
            &mut buf,
            &["tool x\n\nmore".into()],
            &["a", "b"],
            &[vec![1.5, 2.7e-11], vec![0.0, 1.89e14]],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# tool x\n#\n# more\na,b\n1.5,2.7e-11\n0,1.89e14\n");
    }

    proptest! {
        #[test]
        fn float_format_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
            let s = format_float(v);
            prop_assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }
}
