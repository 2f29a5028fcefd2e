//! Plain-text LP-format export.
//!
//! Writes `Minimize` / `Subject To` / `Bounds` / `Binaries` / `End` sections
//! so a model can be inspected or cross-checked with an external solver.
//! Names that the format cannot carry are sanitized deterministically and the
//! applied renames are reported back to the caller.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::milp::model::{MilpModel, ModelError};

/// Soft limit before a continuation line is started.
const WRAP_COLUMNS: usize = 240;

/// Result of an export: the file text plus any renames the sanitizer applied
/// (original name → name used in the file).
#[derive(Clone, Debug)]
pub struct LpExport {
    pub text: String,
    pub renamed: BTreeMap<String, String>,
}

/// Renders the model in LP format. Fails only if the model itself is invalid.
pub fn write_lp(model: &MilpModel) -> Result<LpExport, ModelError> {
    model.validate()?;

    let mut renamed = BTreeMap::new();
    let var_names = sanitize_all(model.vars().iter().map(|v| v.name.as_str()), &mut renamed);
    let row_names =
        sanitize_all(model.constraints().iter().map(|c| c.name.as_str()), &mut renamed);

    let mut text = String::new();
    text.push_str("Minimize\n");
    let mut line = String::from(" obj:");
    for &(var, coef) in model.objective() {
        let first = line.len() == 5;
        append_term(&mut text, &mut line, coef, &var_names[var.index()], first);
    }
    text.push_str(&line);
    text.push('\n');

    text.push_str("Subject To\n");
    for (ci, con) in model.constraints().iter().enumerate() {
        let mut line = format!(" {}:", row_names[ci]);
        let head = line.len();
        for &(var, coef) in &con.terms {
            let first = line.len() == head;
            append_term(&mut text, &mut line, coef, &var_names[var.index()], first);
        }
        if con.terms.is_empty() {
            // LP format has no empty left-hand side; emit an explicit zero.
            line.push_str(" 0 x0_zero__");
        }
        line.push_str(&format!(" {} {}", con.sense, num(con.rhs)));
        text.push_str(&line);
        text.push('\n');
    }

    text.push_str("Bounds\n");
    for (vi, var) in model.vars().iter().enumerate() {
        let name = &var_names[vi];
        let lo = var.lower;
        let up = var.upper;
        let row = if lo.is_finite() && up.is_finite() {
            format!(" {} <= {} <= {}", num(lo), name, num(up))
        } else if lo.is_finite() {
            format!(" {} >= {}", name, num(lo))
        } else if up.is_finite() {
            format!(" {} <= {}", name, num(up))
        } else {
            format!(" {} free", name)
        };
        text.push_str(&row);
        text.push('\n');
    }

    let binaries: Vec<&String> = model
        .vars()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == crate::milp::model::VarKind::Binary)
        .map(|(i, _)| &var_names[i])
        .collect();
    if !binaries.is_empty() {
        text.push_str("Binaries\n");
        let mut line = String::from(" ");
        for name in binaries {
            if line.len() > 1 && line.len() + name.len() + 1 > WRAP_COLUMNS {
                text.push_str(line.trim_end());
                text.push('\n');
                line = String::from(" ");
            }
            if line.len() > 1 {
                line.push(' ');
            }
            line.push_str(name);
        }
        text.push_str(line.trim_end());
        text.push('\n');
    }
    text.push_str("End\n");

    // The fallback zero-term references a variable that must exist; declare
    // it only if it was actually used and the model has no variables at all.
    debug_assert!(!text.contains("x0_zero__") || !model.constraints().is_empty());

    Ok(LpExport { text, renamed })
}

/// Formats one coefficient*variable term and appends it, wrapping the
/// physical line when it grows past the soft limit.
fn append_term(text: &mut String, line: &mut String, coef: f64, name: &str, first: bool) {
    let piece = if coef == 1.0 {
        if first { format!(" {name}") } else { format!(" + {name}") }
    } else if coef == -1.0 {
        format!(" - {name}")
    } else if coef < 0.0 {
        format!(" - {} {name}", num(-coef))
    } else if first {
        format!(" {} {name}", num(coef))
    } else {
        format!(" + {} {name}", num(coef))
    };
    if line.len() + piece.len() > WRAP_COLUMNS && !first {
        text.push_str(line);
        text.push('\n');
        line.clear();
        line.push(' ');
    }
    line.push_str(&piece);
}

/// Plain decimal rendering: `Display` already picks the shortest round-trip
/// form, but it may use scientific notation for extreme magnitudes, which LP
/// readers reject; expand those cases.
fn num(v: f64) -> String {
    let s = v.to_string();
    if !s.contains('e') && !s.contains('E') {
        return s;
    }
    // Extreme magnitude: fall back to a fixed-point expansion.
    if v.abs() >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.32}").trim_end_matches('0').to_string()
    }
}

fn sanitize_all<'a>(
    names: impl Iterator<Item = &'a str>,
    renamed: &mut BTreeMap<String, String>,
) -> Vec<String> {
    let mut used: alloc::collections::BTreeSet<String> = alloc::collections::BTreeSet::new();
    let mut out = Vec::new();
    for name in names {
        let mut clean = sanitize(name);
        if used.contains(&clean) {
            let mut k = 2usize;
            loop {
                let candidate = format!("{clean}_{k}");
                if !used.contains(&candidate) {
                    clean = candidate;
                    break;
                }
                k += 1;
            }
        }
        if clean != name {
            renamed.insert(name.to_string(), clean.clone());
        }
        used.insert(clean.clone());
        out.push(clean);
    }
    out
}

/// Maps a name onto the LP identifier alphabet: letters, digits, and
/// `_ ( ) . # @` with a non-digit, non-dot first character.
fn sanitize(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for ch in name.chars() {
        let ok = ch.is_ascii_alphanumeric() || matches!(ch, '_' | '(' | ')' | '.' | '#' | '@');
        out.push(if ok { ch } else { '_' });
    }
    if out.is_empty() {
        out.push('_');
    }
    let first = out.chars().next().unwrap();
    if first.is_ascii_digit() || first == '.' {
        out.insert(0, '_');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::model::{MilpModel, Sense};

    #[test]
    fn minimal_model_golden_text() {
        let mut m = MilpModel::new();
        let x = m.add_binary("x").unwrap();
        m.add_constraint("force", [(x, 1.0)], Sense::Ge, 1.0).unwrap();
        m.set_objective([(x, 1.0)]).unwrap();
        let got = write_lp(&m).unwrap();
        let want = "Minimize\n obj: x\nSubject To\n force: x >= 1\nBounds\n 0 <= x <= 1\nBinaries\n x\nEnd\n";
        assert_eq!(got.text, want);
        assert!(got.renamed.is_empty());
    }

    #[test]
    fn coefficient_rendering() {
        let mut m = MilpModel::new();
        let a = m.add_continuous("a", 0.0, 10.0).unwrap();
        let b = m.add_continuous("b", -1.0, f64::INFINITY).unwrap();
        let c = m.add_continuous("c", f64::NEG_INFINITY, f64::INFINITY).unwrap();
        m.add_constraint("r", [(a, 1.0), (b, -1.0), (c, 2.5)], Sense::Le, 4.0).unwrap();
        m.set_objective([(a, -3.0), (b, 1.0)]).unwrap();
        let text = write_lp(&m).unwrap().text;
        assert!(text.contains(" obj: - 3 a + b\n"), "{text}");
        assert!(text.contains(" r: a - b + 2.5 c <= 4\n"), "{text}");
        assert!(text.contains(" 0 <= a <= 10\n"), "{text}");
        assert!(text.contains(" b >= -1\n"), "{text}");
        assert!(text.contains(" c free\n"), "{text}");
    }

    #[test]
    fn sanitizer_rewrites_and_reports() {
        let mut m = MilpModel::new();
        let a = m.add_continuous("flow a->b", 0.0, 1.0).unwrap();
        let b = m.add_continuous("flow a__b", 0.0, 1.0).unwrap();
        let c = m.add_continuous("0start", 0.0, 1.0).unwrap();
        m.add_constraint("row one", [(a, 1.0), (b, 1.0), (c, 1.0)], Sense::Le, 2.0).unwrap();
        m.set_objective([(a, 1.0)]).unwrap();
        let got = write_lp(&m).unwrap();
        assert_eq!(got.renamed.get("flow a->b").unwrap(), "flow_a__b");
        // The second variable collides with the sanitized first; it gets a
        // numeric suffix.
        assert_eq!(got.renamed.get("flow a__b").unwrap(), "flow_a__b_2");
        assert_eq!(got.renamed.get("0start").unwrap(), "_0start");
        assert_eq!(got.renamed.get("row one").unwrap(), "row_one");
        assert!(got.text.contains("flow_a__b + flow_a__b_2 + _0start"), "{}", got.text);
    }

    #[test]
    fn long_rows_wrap_onto_continuation_lines() {
        let mut m = MilpModel::new();
        let vars: Vec<_> = (0..60)
            .map(|i| m.add_continuous(format!("very_long_variable_name_{i:03}"), 0.0, 1.0).unwrap())
            .collect();
        m.add_constraint(
            "wide",
            vars.iter().map(|&v| (v, 1.0)).collect::<Vec<_>>(),
            Sense::Le,
            30.0,
        )
        .unwrap();
        m.set_objective(vars.iter().map(|&v| (v, 1.0))).unwrap();
        let text = write_lp(&m).unwrap().text;
        for line in text.lines() {
            assert!(line.len() <= WRAP_COLUMNS + 40, "overlong line: {}", line.len());
        }
        // Deterministic: same model renders the same bytes.
        let again = write_lp(&m).unwrap().text;
        assert_eq!(text, again);
    }

    #[test]
    fn big_numbers_avoid_scientific_notation() {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", 0.0, 1e22).unwrap();
        m.add_constraint("r", [(x, 1e21)], Sense::Le, 1e22).unwrap();
        m.set_objective([(x, 1.0)]).unwrap();
        let text = write_lp(&m).unwrap().text;
        // No digit followed by an exponent marker anywhere in the file.
        let scientific = text.as_bytes().windows(2).any(|w| {
            w[0].is_ascii_digit() && (w[1] == b'e' || w[1] == b'E')
        });
        assert!(!scientific, "{text}");
        assert!(text.contains("1000000000000000000000 x"), "{text}");
    }
}
