use qmetro_core::correlations::{suggested_cutoff, table_row, OracleCheck, StateId};

use crate::args::TableArgs;
use crate::error::CliError;
use crate::output::{Cell, Table};

pub const COLUMNS: &[&str] = &["state", "n_bar", "q", "j", "qfi", "status"];
pub const ORACLE_COLUMNS: &[&str] = &[
    "state", "n_bar", "q", "j", "qfi", "oracle_q", "oracle_j", "oracle_qfi", "max_rel_dev", "cutoff", "deficit", "status",
];

pub fn table(args: &TableArgs) -> Result<Table, CliError> {
    if !(args.n_bar > 0.0) || !args.n_bar.is_finite() {
        return Err(CliError::Usage(format!("--nbar must be positive and finite, got {}", args.n_bar)));
    }
    let mut out = Table::new(if args.oracle { ORACLE_COLUMNS } else { COLUMNS });
    out.meta("command", "table").meta("n_bar", args.n_bar).meta("qfi_generator", "(n_a-n_b)/2");
    if args.oracle {
        out.meta("cutoff", args.cutoff.map_or("per-state".to_string(), |c| c.to_string()));
    }

    for id in StateId::ALL {
        let closed = table_row(id, args.n_bar);
        let (q, j, qfi) = match &closed {
            Ok(row) => (Cell::Real(row.q), Cell::Real(row.j), Cell::Real(row.qfi)),
            Err(_) => (Cell::Missing, Cell::Missing, Cell::Missing),
        };
        let mut row = vec![id.name().into(), args.n_bar.into(), q, j, qfi];
        if !args.oracle {
            row.push(match &closed {
                Ok(_) if !id.has_oracle() => "formula-only".into(),
                Ok(_) => "ok".into(),
                Err(e) => format!("error: {e}").into(),
            });
            out.push(row);
            continue;
        }
        if let Err(e) = &closed {
            row.extend([Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing]);
            row.push(format!("error: {e}").into());
            out.push(row);
            continue;
        }
        if !id.has_oracle() {
            row.extend([Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing]);
            row.push("formula-only".into());
            out.push(row);
            continue;
        }
        let check = args
            .cutoff
            .map_or_else(|| suggested_cutoff(id, args.n_bar), Ok)
            .and_then(|cutoff| OracleCheck::run(id, args.n_bar, cutoff));
        match check {
            Ok(c) => {
                row.extend([
                    Cell::from(c.stats.q_a),
                    Cell::from(c.stats.j),
                    Cell::Real(c.stats.qfi),
                    Cell::Real(c.max_deviation()),
                    Cell::Count(c.cutoff),
                    Cell::Real(c.deficit),
                    "ok".into(),
                ]);
            }
            Err(e) => {
                row.extend([Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing]);
                row.push(format!("error: {e}").into());
            }
        }
        out.push(row);
    }
    Ok(out)
}
