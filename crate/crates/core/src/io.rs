//! CSV field files, MatrixMarket matrices and right-hand sides.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::assembly::SaddleSystem;
use crate::error::{Error, Result};
use crate::fields::{ScalarField, VectorField};
use crate::grid::Grid;
use crate::sparse::{SparseMatrix, TripletBuilder};
use crate::verify::fmt_f64;

pub const MATRIX_FILE: &str = "system.mtx";
pub const RHS_FILE: &str = "rhs.csv";

/// Rows `i,j,value`.
pub fn write_scalar_field<W: Write>(w: W, grid: &Grid, q: &ScalarField) -> Result<()> {
    q.check(grid)?;
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["i", "j", "value"])?;
    for (k, v) in q.0.iter().enumerate() {
        let (i, j) = grid.ij(k);
        wr.write_record([i.to_string(), j.to_string(), fmt_f64(*v)])?;
    }
    wr.flush()?;
    Ok(())
}

/// Rows `i,j,vx,vy`.
pub fn write_vector_field<W: Write>(w: W, grid: &Grid, u: &VectorField) -> Result<()> {
    u.check(grid)?;
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["i", "j", "vx", "vy"])?;
    for k in 0..grid.cell_count() {
        let (i, j) = grid.ij(k);
        let [a, b] = u.at(k);
        wr.write_record([i.to_string(), j.to_string(), fmt_f64(a), fmt_f64(b)])?;
    }
    wr.flush()?;
    Ok(())
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} `{s}`")))
}

fn read_field_columns<R: Read>(r: R, grid: &Grid, ncols: usize) -> Result<Vec<Vec<f64>>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut cols = vec![vec![f64::NAN; grid.cell_count()]; ncols];
    let mut seen = vec![false; grid.cell_count()];
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() != ncols + 2 {
            return Err(Error::Parse(format!("expected {} columns, got {}", ncols + 2, rec.len())));
        }
        let i: usize = parse(&rec[0], "index")?;
        let j: usize = parse(&rec[1], "index")?;
        if i >= grid.nx() || j >= grid.ny() {
            return Err(Error::Parse(format!("cell ({i}, {j}) outside the grid")));
        }
        let k = grid.index(i, j);
        if seen[k] {
            return Err(Error::Parse(format!("cell ({i}, {j}) listed twice")));
        }
        seen[k] = true;
        for (c, col) in cols.iter_mut().enumerate() {
            col[k] = parse(&rec[c + 2], "value")?;
        }
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        let (i, j) = grid.ij(k);
        return Err(Error::Parse(format!("cell ({i}, {j}) missing")));
    }
    Ok(cols)
}

pub fn read_scalar_field<R: Read>(r: R, grid: &Grid) -> Result<ScalarField> {
    let mut cols = read_field_columns(r, grid, 1)?;
    Ok(ScalarField(cols.remove(0)))
}

pub fn read_vector_field<R: Read>(r: R, grid: &Grid) -> Result<VectorField> {
    let mut cols = read_field_columns(r, grid, 2)?;
    let y = cols.remove(1);
    let x = cols.remove(0);
    Ok(VectorField {
        x: ScalarField(x),
        y: ScalarField(y),
    })
}

/// Coordinate format, general storage, one-based indices.
pub fn write_matrix_market<W: Write>(w: W, m: &SparseMatrix) -> Result<()> {
    let mut w = BufWriter::new(w);
    let mut entries: Vec<(usize, usize, f64)> =
        m.triplet_iter().map(|t| (t.row, t.col, *t.val)).collect();
    entries.sort_by_key(|&(r, c, _)| (c, r));
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), entries.len())?;
    for (r, c, v) in entries {
        writeln!(w, "{} {} {}", r + 1, c + 1, fmt_f64(v))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads coordinate real matrices in general or symmetric storage.
pub fn read_matrix_market<R: Read>(r: R) -> Result<SparseMatrix> {
    let mut lines = BufReader::new(r).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty MatrixMarket file".into()))??;
    let h: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if h.len() != 5 || h[0] != "%%matrixmarket" || h[1] != "matrix" || h[2] != "coordinate" {
        return Err(Error::Parse(format!("unsupported MatrixMarket header `{header}`")));
    }
    if h[3] != "real" && h[3] != "integer" {
        return Err(Error::Parse(format!("unsupported field `{}`", h[3])));
    }
    let symmetric = match h[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::Parse(format!("unsupported symmetry `{other}`"))),
    };
    let mut body = lines.filter(|l| match l {
        Ok(s) => !s.trim().is_empty() && !s.starts_with('%'),
        Err(_) => true,
    });
    let size = body
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))??;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|s| parse(s, "size"))
        .collect::<Result<_>>()?;
    let [nrows, ncols, nnz] = dims[..] else {
        return Err(Error::Parse(format!("bad size line `{size}`")));
    };
    let mut t = TripletBuilder::new(nrows, ncols);
    let mut count = 0;
    for line in body {
        let line = line?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("bad entry `{line}`")));
        }
        let r: usize = parse(parts[0], "row")?;
        let c: usize = parse(parts[1], "column")?;
        let v: f64 = parse(parts[2], "value")?;
        if r == 0 || c == 0 || r > nrows || c > ncols {
            return Err(Error::Parse(format!("entry ({r}, {c}) out of range")));
        }
        t.push(r - 1, c - 1, v);
        if symmetric && r != c {
            t.push(c - 1, r - 1, v);
        }
        count += 1;
    }
    if count != nnz {
        return Err(Error::Parse(format!("expected {nnz} entries, found {count}")));
    }
    t.build()
}

/// Rows `index,value`.
pub fn write_vector_csv<W: Write>(w: W, v: &[f64]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["index", "value"])?;
    for (i, x) in v.iter().enumerate() {
        wr.write_record([i.to_string(), fmt_f64(*x)])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_vector_csv<R: Read>(r: R) -> Result<Vec<f64>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for (n, rec) in rd.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Parse(format!("expected 2 columns, got {}", rec.len())));
        }
        let i: usize = parse(&rec[0], "index")?;
        if i != n {
            return Err(Error::Parse(format!("row {n} has index {i}")));
        }
        out.push(parse(&rec[1], "value")?);
    }
    Ok(out)
}

/// Writes the full matrix and right-hand side of `system` into `dir`.
pub fn export_system(dir: &Path, system: &SaddleSystem) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_matrix_market(File::create(dir.join(MATRIX_FILE))?, &system.matrix()?)?;
    write_vector_csv(File::create(dir.join(RHS_FILE))?, &system.full_rhs())?;
    Ok(())
}

/// Reads back a system written by [`export_system`].
pub fn import_system(dir: &Path) -> Result<(SparseMatrix, Vec<f64>)> {
    let m = read_matrix_market(File::open(dir.join(MATRIX_FILE))?)?;
    let b = read_vector_csv(File::open(dir.join(RHS_FILE))?)?;
    if b.len() != m.nrows() {
        return Err(Error::Parse(format!(
            "right-hand side has {} rows, matrix {}",
            b.len(),
            m.nrows()
        )));
    }
    Ok((m, b))
}
