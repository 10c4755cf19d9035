use std::io::{Read, Write};

use super::{GridSpec, TongueGrid};
use crate::error::Result;
use crate::format::sig;

/// Grid as CSV `x,y,winding`, row-major, 9 significant digits.
pub fn write_grid_csv<W: Write>(grid: &TongueGrid, mut out: W) -> Result<()> {
    writeln!(out, "x,y,winding")?;
    let spec = &grid.spec;
    for row in 0..spec.rows() {
        let y = spec.y_axis.value(row);
        for col in 0..spec.cols() {
            let x = spec.x_axis.value(col);
            writeln!(
                out,
                "{},{},{}",
                sig(x, 9),
                sig(y, 9),
                sig(grid.at(row, col), 9)
            )?;
        }
    }
    Ok(())
}

/// JSON sidecar describing how the grid was computed.
pub fn write_grid_json<W: Write>(spec: &GridSpec, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, spec)?;
    Ok(())
}

pub fn read_grid_json<R: Read>(input: R) -> Result<GridSpec> {
    let spec: GridSpec = serde_json::from_reader(input)?;
    spec.validate()?;
    Ok(spec)
}
