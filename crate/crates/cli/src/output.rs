//! Report emission: stdout or `--output`, JSON via serde, CSV by hand
//! with `.` decimals and 17 significant digits on every float.

use crate::CliError;

pub fn emit(text: &str, output: Option<&str>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError {
            code: 2,
            message: format!("cannot write '{path}': {e}"),
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Full-precision float field for CSV: 17 significant digits.
pub fn csv_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Assembles header + rows into one CSV document.
pub fn csv_table(header: &str, rows: &[String]) -> String {
    let mut out = String::with_capacity(header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>() + 1);
    out.push_str(header);
    for row in rows {
        out.push('\n');
        out.push_str(row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_carry_17_significant_digits() {
        for x in [4.050134694288943e-8, 0.329393, -1.5, 0.0] {
            let rendered = csv_f64(x);
            assert_eq!(rendered.parse::<f64>().unwrap(), x, "round trip of {rendered}");
            let mantissa = rendered.trim_start_matches('-');
            let mantissa = &mantissa[..mantissa.find('e').unwrap()];
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
    }

    #[test]
    fn csv_assembly() {
        assert_eq!(
            csv_table("q,n,value", &["1,2,3".to_string(), "4,5,6".to_string()]),
            "q,n,value\n1,2,3\n4,5,6"
        );
    }
}
