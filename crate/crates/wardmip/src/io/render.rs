//! Rendering finished rosters: planner-facing grids and CSV files.
//!
//! The grid is the deliverable a ward can pin to the wall — one row per
//! nurse, one column per day, shift labels in the cells and an en dash
//! for days off. The CSV twin carries the same table in RFC-4180 form
//! for spreadsheets and for feeding back into `validate`.

use super::IoError;
use crate::model::ProblemInstance;
use crate::roster::Roster;

/// A day off, in grid cells.
const OFF_CELL: &str = "–";

/// Output flavours of [`render_roster`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RosterFormat {
    /// Fixed-width table for humans.
    Grid,
    /// RFC-4180 CSV: header of day numbers, one line per nurse.
    Csv,
}

/// Render a roster whose shape matches the instance.
///
/// Grid cells show the shift label or an en dash for a day off; the CSV
/// uses empty cells for days off. Both forms list nurses in instance
/// order and days 1-based.
pub fn render_roster(inst: &ProblemInstance, roster: &Roster, format: RosterFormat) -> String {
    assert_eq!(roster.nurses(), inst.nurse_count(), "roster/instance nurse count mismatch");
    assert_eq!(roster.horizon(), inst.horizon, "roster/instance horizon mismatch");
    match format {
        RosterFormat::Grid => render_grid(inst, roster),
        RosterFormat::Csv => render_csv(inst, roster),
    }
}

fn render_grid(inst: &ProblemInstance, roster: &Roster) -> String {
    let labels = &inst.shift_set.labels;
    let cell = |n: usize, d: usize| -> &str {
        roster.get(n, d).map_or(OFF_CELL, |s| labels[s].as_str())
    };

    let name_width = inst
        .nurses
        .iter()
        .map(|n| n.id.chars().count())
        .chain(std::iter::once("nurse".len()))
        .max()
        .unwrap_or(5);
    let day_width = labels
        .iter()
        .map(|l| l.chars().count())
        .chain(std::iter::once(format!("{}", inst.horizon).len()))
        .max()
        .unwrap_or(2);

    let pad = |text: &str, width: usize| {
        let mut s = text.to_string();
        for _ in text.chars().count()..width {
            s.push(' ');
        }
        s
    };

    let mut lines = Vec::with_capacity(inst.nurse_count() + 2);
    let mut header = pad("nurse", name_width);
    for d in 0..inst.horizon {
        header.push_str("  ");
        header.push_str(&pad(&format!("{}", d + 1), day_width));
    }
    lines.push(header);
    lines.push("-".repeat(name_width + inst.horizon * (day_width + 2)));
    for (n, nurse) in inst.nurses.iter().enumerate() {
        let mut row = pad(&nurse.id, name_width);
        for d in 0..inst.horizon {
            row.push_str("  ");
            row.push_str(&pad(cell(n, d), day_width));
        }
        lines.push(row);
    }
    let mut out = String::new();
    for line in &lines {
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn render_csv(inst: &ProblemInstance, roster: &Roster) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["nurse".to_string()];
    header.extend((1..=inst.horizon).map(|d| d.to_string()));
    writer.write_record(&header).expect("writing to memory cannot fail");
    for (n, nurse) in inst.nurses.iter().enumerate() {
        let mut record = vec![nurse.id.clone()];
        record.extend((0..inst.horizon).map(|d| {
            roster
                .get(n, d)
                .map_or(String::new(), |s| inst.shift_set.labels[s].clone())
        }));
        writer.write_record(&record).expect("writing to memory cannot fail");
    }
    let bytes = writer.into_inner().expect("writer flushes to memory");
    String::from_utf8(bytes).expect("csv of UTF-8 fields is UTF-8")
}

/// Parse a roster CSV produced by [`render_roster`] (or edited by hand)
/// back into a [`Roster`] shaped like the instance.
///
/// Rows may appear in any order — the first column's nurse id decides the
/// row — but every nurse must appear exactly once, every line must list
/// one cell per day, and cells must be shift labels or empty.
pub fn parse_roster_csv(inst: &ProblemInstance, text: &str) -> Result<Roster, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());

    let header = reader
        .headers()
        .map_err(|e| IoError::Roster(format!("unreadable header: {e}")))?
        .clone();
    if header.len() != inst.horizon + 1 {
        return Err(IoError::Roster(format!(
            "header has {} day columns but the instance has {} days",
            header.len().saturating_sub(1),
            inst.horizon
        )));
    }

    let nurse_index: std::collections::HashMap<&str, usize> = inst
        .nurses
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id.as_str(), i))
        .collect();
    let label_index: std::collections::HashMap<&str, usize> = inst
        .shift_set
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();

    let mut roster = Roster::empty(inst.nurse_count(), inst.shift_count(), inst.horizon);
    let mut seen = vec![false; inst.nurse_count()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IoError::Roster(format!("line {}: {e}", row + 2)))?;
        let id = record.get(0).unwrap_or("");
        let &n = nurse_index.get(id).ok_or_else(|| {
            IoError::Roster(format!("line {}: unknown nurse id {id:?}", row + 2))
        })?;
        if std::mem::replace(&mut seen[n], true) {
            return Err(IoError::Roster(format!("line {}: nurse {id:?} appears twice", row + 2)));
        }
        if record.len() != inst.horizon + 1 {
            return Err(IoError::Roster(format!(
                "line {}: {} day cells, expected {}",
                row + 2,
                record.len().saturating_sub(1),
                inst.horizon
            )));
        }
        for d in 0..inst.horizon {
            let cell = record.get(d + 1).unwrap_or("").trim();
            if cell.is_empty() {
                continue;
            }
            let &shift = label_index.get(cell).ok_or_else(|| {
                IoError::Roster(format!(
                    "line {}, day {}: {cell:?} is not a shift label",
                    row + 2,
                    d + 1
                ))
            })?;
            roster.set(n, d, Some(shift));
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(IoError::Roster(format!(
            "nurse {:?} is missing from the file",
            inst.nurses[missing].id
        )));
    }
    Ok(roster)
}

// ===========================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_li2003;

    #[test]
    fn empty_roster_renders_as_dashes() {
        let inst = builtin_li2003(0);
        let roster = Roster::empty(inst.nurse_count(), inst.shift_count(), inst.horizon);
        let grid = render_roster(&inst, &roster, RosterFormat::Grid);
        let body: Vec<&str> = grid.lines().skip(2).collect();
        assert_eq!(body.len(), 27);
        for l in &body {
            assert_eq!(l.matches(OFF_CELL).count(), 7, "not all off: {l}");
        }
    }

    #[test]
    fn grid_shape_matches_the_instance() {
        let inst = builtin_li2003(0);
        let mut roster = Roster::empty(inst.nurse_count(), inst.shift_count(), inst.horizon);
        roster.set(0, 0, Some(2));
        let grid = render_roster(&inst, &roster, RosterFormat::Grid);
        // Header + rule + 27 nurse rows; 7 cells after the name column.
        assert_eq!(grid.lines().count(), 29);
        let first = grid.lines().nth(2).unwrap();
        assert!(first.contains("MN"));
    }

    #[test]
    fn csv_has_one_line_per_nurse_plus_header() {
        let inst = builtin_li2003(0);
        let roster = Roster::empty(inst.nurse_count(), inst.shift_count(), inst.horizon);
        let text = render_roster(&inst, &roster, RosterFormat::Csv);
        assert_eq!(text.lines().count(), inst.nurse_count() + 1);
    }

    #[test]
    fn csv_round_trips_through_the_parser() {
        let inst = builtin_li2003(0);
        let mut roster = Roster::empty(inst.nurse_count(), inst.shift_count(), inst.horizon);
        roster.set(0, 0, Some(0));
        roster.set(3, 2, Some(1));
        roster.set(26, 6, Some(2));
        let text = render_roster(&inst, &roster, RosterFormat::Csv);
        let back = parse_roster_csv(&inst, &text).expect("own csv parses");
        assert_eq!(back.to_values(), roster.to_values());
    }

    #[test]
    fn csv_with_wrong_shape_or_labels_errors() {
        let inst = builtin_li2003(0);
        let bad_header = "nurse,1,2\nn01,,\n";
        assert!(matches!(parse_roster_csv(&inst, bad_header), Err(IoError::Roster(_))));

        let roster = Roster::empty(inst.nurse_count(), inst.shift_count(), inst.horizon);
        let good = render_roster(&inst, &roster, RosterFormat::Csv);
        let bad_label = good.replacen("n01,,", "n01,XX,", 1);
        match parse_roster_csv(&inst, &bad_label) {
            Err(IoError::Roster(msg)) => assert!(msg.contains("XX"), "message: {msg}"),
            other => panic!("expected a roster error, got {other:?}"),
        }

        let unknown = good.replacen("n01,", "n99,", 1);
        match parse_roster_csv(&inst, &unknown) {
            Err(IoError::Roster(msg)) => assert!(msg.contains("n99"), "message: {msg}"),
            other => panic!("expected a roster error, got {other:?}"),
        }
    }
}
