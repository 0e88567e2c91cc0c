//! A small blockage sweep over three seeds, written as CSV to stdout.

use rml_v2x::experiment::results::write_rows;
use rml_v2x::experiment::{run_sweep, Preset, SweepSpec};

fn main() -> rml_v2x::Result<()> {
    let mut spec = SweepSpec::preset(Preset::Fig4To6, 3);
    spec.values = vec![2, 6, 10];
    let table = run_sweep(&spec, 4)?;
    write_rows(&table.rows, std::io::stdout().lock())
}
