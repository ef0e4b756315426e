//! Plain-text grid files.
//!
//! ```text
//! # extremal-annulus/1
//! # polar,<n_t>,<n_theta>,<r>,<R>,<r*>,<R*>
//! 0,0,1.0000000000000000e0,0.0000000000000000e0
//! ...
//! ```
//!
//! Rectangle files use `# rect,<n_x>,<n_y>,<ell>,<L>,<periodic 0|1>`. Each
//! data row is `i,j,re,im` with 17 significant digits, radial (or `x`) index
//! first, rows ordered by `i` then `j`. Stored derivatives are not written;
//! reading recomputes them by finite differences.

use std::io::Write;

use num_complex::Complex64;

use super::grid::{GridMap, PolarGridMap, RectGridMap};
use crate::annulus::{Annulus, Rectangle};
use crate::error::{Error, Result};

pub const MAGIC: &str = "# extremal-annulus/1";

pub fn write_grid<W: Write>(m: &GridMap, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{MAGIC}")?;
    match m {
        GridMap::Polar(p) => writeln!(
            w,
            "# polar,{},{},{},{},{},{}",
            p.n_t(),
            p.n_theta(),
            p.dom().r_inner(),
            p.dom().r_outer(),
            p.tgt().r_inner(),
            p.tgt().r_outer()
        )?,
        GridMap::Rect(r) => writeln!(
            w,
            "# rect,{},{},{},{},{}",
            r.n_x(),
            r.n_y(),
            r.q1().length(),
            r.q2().length(),
            u8::from(r.periodic())
        )?,
    }
    let (rows, cols) = m.shape();
    for i in 0..rows {
        for j in 0..cols {
            let v = m.value(i, j);
            writeln!(w, "{i},{j},{:.16e},{:.16e}", v.re, v.im)?;
        }
    }
    Ok(())
}

pub fn grid_to_string(m: &GridMap) -> String {
    let mut buf = Vec::new();
    write_grid(m, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("grid files are ASCII")
}

fn parse<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("line {line}: bad {what} `{}`", s.trim())))
}

pub fn read_grid(text: &str) -> Result<GridMap> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == MAGIC => {}
        _ => return Err(Error::Parse(format!("missing `{MAGIC}` header"))),
    }
    let (n, header) = lines.next().ok_or_else(|| Error::Parse("missing shape header".into()))?;
    let fields: Vec<&str> = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("shape header must start with `#`".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    let (rows, cols) = match fields.first() {
        Some(&"polar") if fields.len() == 7 => {
            (parse::<usize>(fields[1], "n_t", n + 1)? + 1, parse::<usize>(fields[2], "n_theta", n + 1)?)
        }
        Some(&"rect") if fields.len() == 6 => {
            (parse::<usize>(fields[1], "n_x", n + 1)? + 1, parse::<usize>(fields[2], "n_y", n + 1)? + 1)
        }
        _ => return Err(Error::Parse(format!("unrecognised shape header `{}`", header.trim()))),
    };
    let mut values = vec![None; rows * cols];
    for (n, line) in lines {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected i,j,re,im", n + 1)));
        }
        let i: usize = parse(parts[0], "row index", n + 1)?;
        let j: usize = parse(parts[1], "column index", n + 1)?;
        if i >= rows || j >= cols {
            return Err(Error::Parse(format!("line {}: index ({i},{j}) outside {rows}x{cols}", n + 1)));
        }
        let v = Complex64::new(parse(parts[2], "real part", n + 1)?, parse(parts[3], "imaginary part", n + 1)?);
        if values[i * cols + j].replace(v).is_some() {
            return Err(Error::Parse(format!("line {}: duplicate node ({i},{j})", n + 1)));
        }
    }
    let values: Vec<Complex64> = values
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.ok_or_else(|| Error::Parse(format!("missing node ({},{})", k / cols, k % cols))))
        .collect::<Result<_>>()?;
    let num = |k: usize| parse::<f64>(fields[k], "parameter", n + 1);
    if fields[0] == "polar" {
        let dom = Annulus::new(num(3)?, num(4)?)?;
        let tgt = Annulus::new(num(5)?, num(6)?)?;
        Ok(GridMap::Polar(PolarGridMap::from_values(dom, tgt, rows - 1, cols, values)?))
    } else {
        let periodic = match fields[5] {
            "0" => false,
            "1" => true,
            other => return Err(Error::Parse(format!("periodic flag `{other}`"))),
        };
        let q1 = Rectangle::new(num(3)?)?;
        let q2 = Rectangle::new(num(4)?)?;
        Ok(GridMap::Rect(RectGridMap::from_values(q1, q2, rows - 1, cols - 1, periodic, values)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_round_trip_is_exact() {
        let a = Annulus::new(1.0, 2.0).unwrap();
        let m: GridMap = PolarGridMap::sample_fn(a, a, 6, 8, Complex64::from_polar).unwrap().into();
        let back = read_grid(&grid_to_string(&m)).unwrap();
        assert_eq!(m.as_polar().unwrap().values(), back.as_polar().unwrap().values());
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_grid("hello").is_err());
        assert!(read_grid("# extremal-annulus/1\n# polar,2,3\n").is_err());
        assert!(read_grid("# extremal-annulus/1\n# rect,2,2,1,1,0\n0,0,0,0\n").is_err());
    }
}
