//! Fixed-format MPS export of a compiled model.
//!
//! Fixed format (fields at columns 2, 5, 15, 25, 40 and 50) is the most
//! widely accepted MPS dialect, so the exported file can be fed to any
//! external solver to cross-check the built-in one. Layout:
//!
//! * `ROWS` — the objective row `OBJ` plus one entry per model row, named
//!   after the row's tag (`C6_n3_d7`), truncated to eight characters with
//!   a deterministic `~k` suffix on collision.
//! * `COLUMNS` — binary assignment columns wrapped in
//!   `'INTORG'`/`'INTEND'` markers, continuous penalty columns after the
//!   markers; one coefficient per line.
//! * `RHS` — non-zero right-hand sides; a non-zero objective constant is
//!   emitted on the objective row (negated, per MPS convention).
//! * `RANGES` — always present, always empty (the model has none).
//! * `BOUNDS` — an explicit `UP … 1.0` for every column.
//!
//! A maximizing model declares `OBJSENSE MAX`; readers that ignore the
//! section will minimize, so flip the sign of their reported objective
//! when comparing.

use std::collections::HashSet;

use crate::compile::IlpModel;

/// Serialize a compiled model as fixed-format MPS text.
///
/// Deterministic: the same model yields byte-identical output.
pub fn export_mps(model: &IlpModel) -> String {
    let mut out = String::new();

    // Rows and columns keep separate name spaces; "OBJ" is reserved.
    let mut row_names = Vec::with_capacity(model.rows.len());
    let mut used_rows: HashSet<String> = HashSet::from(["OBJ".to_string()]);
    for row in &model.rows {
        row_names.push(unique_name(&row.tag.to_string(), &mut used_rows));
    }
    let mut col_names = Vec::with_capacity(model.columns.len());
    let mut used_cols: HashSet<String> = HashSet::new();
    for col in &model.columns {
        col_names.push(unique_name(&col.name(), &mut used_cols));
    }

    // Transpose the row-wise coefficients into per-column entry lists.
    let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.columns.len()];
    for (r, row) in model.rows.iter().enumerate() {
        for (&c, &a) in row.cols.iter().zip(&row.coefs) {
            entries[c as usize].push((r, a));
        }
    }

    out.push_str(&format!("NAME          {}\n", sanitize(&model.name)));
    if model.objective_sense == crate::compile::ObjectiveSense::Maximize {
        out.push_str("OBJSENSE\n    MAX\n");
    }

    out.push_str("ROWS\n");
    out.push_str(&line("N", "OBJ", "", "", ""));
    for (row, name) in model.rows.iter().zip(&row_names) {
        let sense = match row.sense {
            crate::compile::RowSense::Le => "L",
            crate::compile::RowSense::Ge => "G",
            crate::compile::RowSense::Eq => "E",
        };
        out.push_str(&line(sense, name, "", "", ""));
    }

    out.push_str("COLUMNS\n");
    let mut in_integer_block = false;
    for (c, (col, name)) in model.columns.iter().zip(&col_names).enumerate() {
        if col.integral != in_integer_block {
            let marker = if col.integral { "'INTORG'" } else { "'INTEND'" };
            out.push_str(&line("", "MARKER", "'MARKER'", "", marker));
            in_integer_block = col.integral;
        }
        let mut wrote = false;
        if col.objective != 0.0 {
            out.push_str(&line("", name, "OBJ", &num(col.objective), ""));
            wrote = true;
        }
        for &(r, a) in &entries[c] {
            out.push_str(&line("", name, &row_names[r], &num(a), ""));
            wrote = true;
        }
        if !wrote {
            // A column must appear in COLUMNS to exist at all.
            out.push_str(&line("", name, "OBJ", &num(0.0), ""));
        }
    }
    if in_integer_block {
        out.push_str(&line("", "MARKER", "'MARKER'", "", "'INTEND'"));
    }

    out.push_str("RHS\n");
    if model.objective_constant != 0.0 {
        // MPS convention: the objective-row RHS holds the negated constant.
        out.push_str(&line("", "RHS", "OBJ", &num(-model.objective_constant), ""));
    }
    for (row, name) in model.rows.iter().zip(&row_names) {
        if row.rhs != 0.0 {
            out.push_str(&line("", "RHS", name, &num(row.rhs), ""));
        }
    }

    out.push_str("RANGES\n");

    out.push_str("BOUNDS\n");
    for (col, name) in model.columns.iter().zip(&col_names) {
        if col.lower != 0.0 {
            out.push_str(&line("LO", "BND", name, &num(col.lower), ""));
        }
        out.push_str(&line("UP", "BND", name, &num(col.upper), ""));
    }

    out.push_str("ENDATA\n");
    out
}

/// One fixed-format line: fields start at columns 2, 5, 15, 25 and 40
/// (1-based). Empty trailing fields are dropped.
fn line(f1: &str, f2: &str, f3: &str, f4: &str, f5: &str) -> String {
    let mut s = String::new();
    for (start, text) in [(1, f1), (4, f2), (14, f3), (24, f4), (39, f5)] {
        if text.is_empty() {
            continue;
        }
        while s.len() < start {
            s.push(' ');
        }
        if s.len() > start {
            s.push(' '); // field overran its slot; keep a separator
        }
        s.push_str(text);
    }
    s.push('\n');
    s
}

/// Shortest exact representation when it fits the 12-character value
/// field, scientific notation otherwise.
fn num(v: f64) -> String {
    let plain = format!("{v}");
    if plain.len() <= 12 {
        plain
    } else {
        format!("{v:.6e}")
    }
}

/// Strip characters MPS readers choke on.
fn sanitize(name: &str) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.' { c } else { '_' })
        .collect();
    if cleaned.is_empty() {
        "MODEL".to_string()
    } else {
        cleaned
    }
}

/// Truncate to eight characters; on collision, retry with a `~k` suffix
/// (base-36 `k`) until free. Deterministic given insertion order.
fn unique_name(raw: &str, used: &mut HashSet<String>) -> String {
    let base: String = raw.chars().take(8).collect();
    if used.insert(base.clone()) {
        return base;
    }
    for k in 1u64.. {
        let suffix = format!("~{}", base36(k));
        let keep = 8usize.saturating_sub(suffix.len());
        let candidate: String = raw.chars().take(keep).chain(suffix.chars()).collect();
        if used.insert(candidate.clone()) {
            return candidate;
        }
    }
    unreachable!("the suffix space is unbounded")
}

fn base36(mut n: u64) -> String {
    const DIGITS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";
    let mut out = Vec::new();
    loop {
        out.push(DIGITS[(n % 36) as usize]);
        n /= 36;
        if n == 0 {
            break;
        }
    }
    out.reverse();
    String::from_utf8(out).expect("base-36 digits are ASCII")
}

// ===========================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::compile;
    use crate::model::{builtin_general_ward, builtin_li2003};

    #[test]
    fn rows_section_counts_every_row_plus_objective() {
        let model = compile(&builtin_li2003(0)).unwrap();
        let text = export_mps(&model);
        let rows_section: Vec<&str> = section(&text, "ROWS");
        assert_eq!(rows_section.len(), model.rows.len() + 1);
    }

    #[test]
    fn integer_block_holds_every_assignment_column() {
        let model = compile(&builtin_general_ward(0)).unwrap();
        let text = export_mps(&model);
        let mut inside = false;
        let mut names = std::collections::HashSet::new();
        for l in section(&text, "COLUMNS") {
            if l.contains("'INTORG'") {
                inside = true;
            } else if l.contains("'INTEND'") {
                inside = false;
            } else if inside {
                names.insert(l.split_whitespace().next().unwrap().to_string());
            }
        }
        assert_eq!(names.len(), 840);
        assert_eq!(names.len(), model.n_assignment);
    }

    #[test]
    fn export_is_deterministic() {
        let a = export_mps(&compile(&builtin_li2003(3)).unwrap());
        let b = export_mps(&compile(&builtin_li2003(3)).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn row_names_are_short_and_unique() {
        let model = compile(&builtin_general_ward(0)).unwrap();
        let text = export_mps(&model);
        let mut seen = std::collections::HashSet::new();
        for l in section(&text, "ROWS") {
            let name = l.split_whitespace().nth(1).unwrap();
            assert!(name.chars().count() <= 8, "name too long: {name}");
            assert!(seen.insert(name.to_string()), "duplicate row name {name}");
        }
    }

    #[test]
    fn bounds_cover_every_column() {
        let model = compile(&builtin_li2003(0)).unwrap();
        let text = export_mps(&model);
        let ups = section(&text, "BOUNDS")
            .iter()
            .filter(|l| l.trim_start().starts_with("UP"))
            .count();
        assert_eq!(ups, model.columns.len());
    }

    #[test]
    fn collisions_get_distinct_suffixes() {
        let mut used = HashSet::new();
        let a = unique_name("C3_n20_d10_w5", &mut used);
        let b = unique_name("C3_n20_d10_w7", &mut used);
        let c = unique_name("C3_n20_d10_w9", &mut used);
        assert_eq!(a, "C3_n20_d");
        assert_eq!(b, "C3_n20~1");
        assert_eq!(c, "C3_n20~2");
    }

    /// Lines strictly inside the named section.
    fn section<'a>(text: &'a str, header: &str) -> Vec<&'a str> {
        let mut out = Vec::new();
        let mut inside = false;
        for l in text.lines() {
            let own_line = !l.starts_with(' ');
            if own_line {
                inside = l == header;
                continue;
            }
            if inside {
                out.push(l);
            }
        }
        out
    }
}
