use super::CsrMatrix;
use crate::{Result, C64};
use std::io::Write;
use std::path::Path;

/// Writes `m` as a complex general coordinate Matrix Market file.
pub fn write_matrix_market(m: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "%%MatrixMarket matrix coordinate complex general")?;
    writeln!(out, "{} {} {}", m.dim(), m.dim(), m.nnz())?;
    for (r, c, v) in m.triplets() {
        writeln!(out, "{} {} {:e} {:e}", r + 1, c + 1, v.re, v.im)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `v` as a complex dense Matrix Market column.
pub fn write_vector_market(v: &[C64], path: impl AsRef<Path>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "%%MatrixMarket matrix array complex general")?;
    writeln!(out, "{} 1", v.len())?;
    for z in v {
        writeln!(out, "{:e} {:e}", z.re, z.im)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_one_based_entries() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.mtx");
        let m = CsrMatrix::from_triplets(2, &[(1, 0, C64::new(2.5, -1.0))]);
        write_matrix_market(&m, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "%%MatrixMarket matrix coordinate complex general");
        assert_eq!(lines[1], "2 2 1");
        assert_eq!(lines[2], "2 1 2.5e0 -1e0");
        let q = dir.path().join("b.mtx");
        write_vector_market(&[C64::new(1.0, 0.0)], &q).unwrap();
        assert!(std::fs::read_to_string(&q).unwrap().ends_with("1e0 0e0\n"));
    }
}
