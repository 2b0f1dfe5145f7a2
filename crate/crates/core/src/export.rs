//! Field export: CSV (coordinates then value per node) and legacy-VTK
//! structured points for 3D fields. Values are written with 17
//! significant digits; bit-exactness across platforms is not promised.

use crate::field::{ScalarField, VectorField};
use std::io::{self, Write};

fn fmt(v: f64) -> String {
    format!("{:.16e}", v)
}

/// CSV with a header naming the axes, one row per node in storage order.
pub fn write_csv(field: &ScalarField, name: &str, out: &mut dyn Write) -> io::Result<()> {
    let g = &field.grid;
    if g.dim == 2 {
        writeln!(out, "x1,x2,{name}")?;
    } else {
        writeln!(out, "x,y,z,{name}")?;
    }
    for i in 0..g.len() {
        let c = g.coords(i);
        if g.dim == 2 {
            writeln!(out, "{},{},{}", fmt(c[0]), fmt(c[1]), fmt(field.values[i]))?;
        } else {
            writeln!(
                out,
                "{},{},{},{}",
                fmt(c[0]),
                fmt(c[1]),
                fmt(c[2]),
                fmt(field.values[i])
            )?;
        }
    }
    Ok(())
}

/// Legacy-VTK structured-points file holding any number of named scalar
/// fields and optional vector fields, all on one 3D grid. VTK orders
/// points x-fastest.
pub fn write_vtk(
    title: &str,
    scalars: &[(&str, &ScalarField)],
    vectors: &[(&str, &VectorField)],
    out: &mut dyn Write,
) -> io::Result<()> {
    let g = scalars
        .first()
        .map(|(_, f)| &f.grid)
        .or_else(|| vectors.first().map(|(_, v)| v.grid()))
        .expect("write_vtk needs at least one field");
    assert_eq!(g.dim, 3, "VTK structured-points export is for 3D fields");
    let [n0, n1, n2] = g.counts;
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{title}")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET STRUCTURED_POINTS")?;
    writeln!(out, "DIMENSIONS {} {} {}", n0, n1, n2)?;
    writeln!(out, "ORIGIN 0 0 0")?;
    writeln!(
        out,
        "SPACING {} {} {}",
        fmt(g.spacing(0)),
        fmt(g.spacing(1)),
        fmt(g.spacing(2))
    )?;
    writeln!(out, "POINT_DATA {}", g.len())?;
    for (name, f) in scalars {
        writeln!(out, "SCALARS {name} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                for i0 in 0..n0 {
                    let idx = g.linear_index([i0, i1, i2]);
                    writeln!(out, "{}", fmt(f.values[idx]))?;
                }
            }
        }
    }
    for (name, v) in vectors {
        writeln!(out, "VECTORS {name} double")?;
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                for i0 in 0..n0 {
                    let idx = g.linear_index([i0, i1, i2]);
                    writeln!(
                        out,
                        "{} {} {}",
                        fmt(v.components[0].values[idx]),
                        fmt(v.components[1].values[idx]),
                        fmt(v.components[2].values[idx])
                    )?;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn csv_round_trips_17_digits() {
        let g = Grid::new_2d([16, 4], [1.0, 1.0], 4).unwrap();
        let mut f = ScalarField::zeros(&g);
        f.values[5] = 1.0 / 3.0;
        let mut buf = Vec::new();
        write_csv(&f, "u", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(6).unwrap();
        let v: f64 = line.split(',').last().unwrap().parse().unwrap();
        assert_eq!(v, 1.0 / 3.0);
        assert!(text.starts_with("x1,x2,u"));
    }

    #[test]
    fn vtk_header_and_point_count() {
        let g = Grid::new_3d([12, 4, 4], [1.0, 1.0, 1.0], 4).unwrap();
        let f = ScalarField::zeros(&g);
        let v = VectorField::zeros(&g, 3);
        let mut buf = Vec::new();
        write_vtk("flow", &[("p", &f)], &[("v", &v)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("DIMENSIONS 12 4 4"));
        assert!(text.contains("POINT_DATA 192"));
        assert!(text.contains("SCALARS p double 1"));
        assert!(text.contains("VECTORS v double"));
    }
}
