use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::FockOperator;
use crate::fourier::forward_fourier;
use crate::grid::{PhaseField, WaveField};
use crate::C64;

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("CSV: {other:?}")),
    }
}

/// 17 significant digits; parses back to the same bits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Format(format!("not a number: {s:?}")))
}

/// `q,p,re,im`, one row per sample in storage order. On the alpha plane the
/// first two columns hold `Re alpha` and `Im alpha`.
pub fn write_field_csv<W: Write>(field: &PhaseField, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["q", "p", "re", "im"]).map_err(csv_err)?;
    let g = &field.grid;
    for i in 0..g.n() {
        let q = fmt17(g.q.at(i));
        for j in 0..g.m() {
            let v = field.get(i, j);
            out.write_record([q.clone(), fmt17(g.p.at(j)), fmt17(v.re), fmt17(v.im)])
                .map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn save_field_csv(field: &PhaseField, path: impl AsRef<Path>) -> Result<()> {
    write_field_csv(field, BufWriter::new(File::create(path)?))
}

/// Rows `[q, p, re, im]` of a field CSV.
pub fn read_field_csv<R: Read>(r: R) -> Result<Vec<[f64; 4]>> {
    let mut rd = csv::Reader::from_reader(r);
    let head = rd.headers().map_err(csv_err)?.clone();
    if head.iter().collect::<Vec<_>>() != ["q", "p", "re", "im"] {
        return Err(Error::Format(format!("unexpected field CSV header {head:?}")));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        let mut row = [0.0; 4];
        for (k, slot) in row.iter_mut().enumerate() {
            *slot = parse_f64(rec.get(k).unwrap_or(""))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn load_field_csv(path: impl AsRef<Path>) -> Result<Vec<[f64; 4]>> {
    read_field_csv(File::open(path)?)
}

/// `axis,x,re,im,reference`: the `q` marginal `sum_j P dp` followed by the
/// `p` marginal `sum_i P dq`. With a wavefunction, `reference` holds
/// `|psi(q)|^2` and `|psi~(p)|^2 / (2 pi hbar)`; otherwise it is empty.
pub fn write_marginals_csv<W: Write>(field: &PhaseField, psi: Option<&WaveField>, w: W) -> Result<()> {
    let g = &field.grid;
    let (qref, pref) = match psi {
        Some(psi) => {
            let off = g.conjugate_offset(psi.grid())?;
            let pd = forward_fourier(psi)?.density();
            (Some(psi.density()), Some(pd[off..off + g.m()].to_vec()))
        }
        None => (None, None),
    };
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["axis", "x", "re", "im", "reference"]).map_err(csv_err)?;
    let sections = [
        ("q", field.position_marginal(), g.q, qref),
        ("p", field.momentum_marginal(), g.p, pref),
    ];
    for (name, marg, axis, reference) in sections {
        for (k, v) in marg.iter().enumerate() {
            let r = reference.as_ref().map(|r| fmt17(r[k])).unwrap_or_default();
            out.write_record([name.to_string(), fmt17(axis.at(k)), fmt17(v.re), fmt17(v.im), r])
                .map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn save_marginals_csv(field: &PhaseField, psi: Option<&WaveField>, path: impl AsRef<Path>) -> Result<()> {
    write_marginals_csv(field, psi, BufWriter::new(File::create(path)?))
}

/// One line per matrix row: `re_0,im_0,re_1,im_1,...`, no header.
pub fn write_density_csv<W: Write>(op: &FockOperator, w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let m = op.matrix();
    for r in 0..m.nrows() {
        let rec: Vec<String> = (0..m.ncols())
            .flat_map(|c| [fmt17(m[(r, c)].re), fmt17(m[(r, c)].im)])
            .collect();
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_density_csv(op: &FockOperator, path: impl AsRef<Path>) -> Result<()> {
    write_density_csv(op, BufWriter::new(File::create(path)?))
}

pub fn read_density_csv<R: Read>(r: R) -> Result<FockOperator> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        let nums = rec.iter().map(parse_f64).collect::<Result<Vec<_>>>()?;
        if nums.len() % 2 != 0 {
            return Err(Error::Format("odd number of columns in density CSV".into()));
        }
        rows.push(nums.chunks(2).map(|c| C64::new(c[0], c[1])).collect());
    }
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::Format("density CSV is not square".into()));
    }
    FockOperator::new(DMatrix::from_fn(d, d, |r, c| rows[r][c]))
}

pub fn load_density_csv(path: impl AsRef<Path>) -> Result<FockOperator> {
    read_density_csv(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::kirkwood_rihaczek;
    use crate::grid::{PhaseGrid, PositionGrid};
    use crate::states::{coherent_wave, CoherentParams};

    #[test]
    fn field_csv_matches_values_exactly() {
        let g = PositionGrid::spanning(-6.0, 6.0, 32).unwrap();
        let psi = coherent_wave(CoherentParams::real(0.5), &g).unwrap();
        let k = kirkwood_rihaczek(&psi, &PhaseGrid::conjugate(&g)).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&k, &mut buf).unwrap();
        let rows = read_field_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 32 * 32);
        for (r, v) in rows.iter().zip(&k.values) {
            assert_eq!(r[2].to_bits(), v.re.to_bits());
            assert_eq!(r[3].to_bits(), v.im.to_bits());
        }
        assert_eq!(rows[33][0], g.q(1));
        assert_eq!(rows[33][1], g.p(1));
    }

    #[test]
    fn marginals_csv_has_both_axes() {
        let g = PositionGrid::spanning(-6.0, 6.0, 32).unwrap();
        let psi = coherent_wave(CoherentParams::real(0.5), &g).unwrap();
        let k = kirkwood_rihaczek(&psi, &PhaseGrid::conjugate(&g)).unwrap();
        let mut buf = Vec::new();
        write_marginals_csv(&k, Some(&psi), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 64);
        assert_eq!(text.lines().filter(|l| l.starts_with("p,")).count(), 32);
    }

    #[test]
    fn density_csv_round_trip() {
        let m = DMatrix::from_fn(3, 3, |r, c| C64::new(r as f64 / 7.0, c as f64 * 1e-3));
        let op = FockOperator::new(m).unwrap();
        let mut buf = Vec::new();
        write_density_csv(&op, &mut buf).unwrap();
        let back = read_density_csv(buf.as_slice()).unwrap();
        assert_eq!(back, op);
        assert!(read_density_csv("1,2,3\n".as_bytes()).is_err());
    }
}
