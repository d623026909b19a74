//! Diagnostics CSV and binary state snapshots.
//!
//! CSV values are written with 17 significant decimal digits so a parsed
//! value is bit-identical to the one written.  Snapshots store the raw
//! lattice values little-endian behind a magic tag, making restart runs
//! exact continuations.

use std::fs;
use std::io::{Read as _, Write as _};
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::experiments::{PairDiffRow, ResolutionDiffRow, TwinSample};
use crate::illposed1d::ModeGrowth;
use crate::model::State;
use crate::spectral::{ScalarField, SpectralGrid, TensorField, VectorField};

pub const DIAGNOSTICS_HEADER: &str = "t,E_l2,dissipation,sym_defect,cancel_residual,\
L2_u,H1_u,H2_u,L2_sigma,H1_sigma,H2_sigma,H3_sigma,Dmin,Dmax";

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(io_err(path))?;
        }
    }
    fs::write(path, text).map_err(io_err(path))
}

/// Render one table: a header line, then one row per record produced by
/// `row`, every float as `{:.16e}`.
fn render_csv<T>(header: &str, rows: &[T], row: impl Fn(&T) -> String) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(header);
    out.push('\n');
    for r in rows {
        out.push_str(&row(r));
        out.push('\n');
    }
    out
}

pub fn write_diagnostics_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    let text = render_csv(DIAGNOSTICS_HEADER, records, |r| {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},\
             {:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.t,
            r.e_l2,
            r.dissipation,
            r.sym_defect,
            r.cancel_residual,
            r.l2_u,
            r.h1_u,
            r.h2_u,
            r.l2_sigma,
            r.h1_sigma,
            r.h2_sigma,
            r.h3_sigma,
            r.dmin,
            r.dmax
        )
    });
    write_text(path, &text)
}

/// Parse a file written by [`write_diagnostics_csv`]; used by the
/// round-trip tests and handy for downstream tooling.
pub fn read_diagnostics_csv(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    let malformed = |message: &str| Error::Malformed {
        path: path.to_path_buf(),
        message: message.to_string(),
    };
    match lines.next() {
        Some(h) if h == DIAGNOSTICS_HEADER => {}
        _ => return Err(malformed("missing or wrong diagnostics header")),
    }
    let mut records = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| malformed(&format!("bad float in row: {e}")))?;
        if fields.len() != 14 {
            return Err(malformed(&format!("expected 14 columns, got {}", fields.len())));
        }
        records.push(DiagnosticsRecord {
            t: fields[0],
            e_l2: fields[1],
            dissipation: fields[2],
            sym_defect: fields[3],
            cancel_residual: fields[4],
            l2_u: fields[5],
            h1_u: fields[6],
            h2_u: fields[7],
            l2_sigma: fields[8],
            h1_sigma: fields[9],
            h2_sigma: fields[10],
            h3_sigma: fields[11],
            dmin: fields[12],
            dmax: fields[13],
        });
    }
    Ok(records)
}

pub fn write_eps_sweep_csv(path: &Path, rows: &[PairDiffRow]) -> Result<()> {
    let text = render_csv("eps_a,eps_b,sup_u_h1,sup_sigma_h1", rows, |r| {
        format!("{:.16e},{:.16e},{:.16e},{:.16e}", r.eps_a, r.eps_b, r.sup_u_h1, r.sup_sigma_h1)
    });
    write_text(path, &text)
}

pub fn write_resolution_sweep_csv(path: &Path, rows: &[ResolutionDiffRow]) -> Result<()> {
    let text = render_csv("n_a,n_b,sup_u_h1,sup_sigma_h1", rows, |r| {
        format!("{},{},{:.16e},{:.16e}", r.n_a, r.n_b, r.sup_u_h1, r.sup_sigma_h1)
    });
    write_text(path, &text)
}

pub fn write_twin_csv(path: &Path, rows: &[TwinSample]) -> Result<()> {
    let text = render_csv("t,D,gronwall_k", rows, |r| {
        format!("{:.16e},{:.16e},{:.16e}", r.t, r.d, r.gronwall_k)
    });
    write_text(path, &text)
}

pub fn write_mode_growth_csv(path: &Path, rows: &[ModeGrowth]) -> Result<()> {
    let text = render_csv("k,predicted_rate,measured_rate,relative_error", rows, |r| {
        format!(
            "{},{:.16e},{:.16e},{:.16e}",
            r.k, r.predicted_rate, r.measured_rate, r.relative_error
        )
    });
    write_text(path, &text)
}

const SNAPSHOT_MAGIC: &[u8; 5] = b"VEVP1";

/// Binary checkpoint: magic, `N: u32`, `M: u32`, `t: f64`, then six
/// row-major `M x M` `f64` arrays `u1, u2, s11, s12, s21, s22`, all
/// little-endian.  Both stress off-diagonals are stored so a snapshot
/// preserves symmetry-defect evidence exactly.
pub fn write_snapshot(path: &Path, state: &State) -> Result<()> {
    if !state.is_finite() {
        return Err(Error::invalid("refusing to snapshot a non-finite state"));
    }
    let grid = state.grid();
    let mut buf =
        Vec::with_capacity(5 + 4 + 4 + 8 + 6 * grid.len() * 8);
    buf.extend_from_slice(SNAPSHOT_MAGIC);
    buf.extend_from_slice(&(grid.n() as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.m() as u32).to_le_bytes());
    buf.extend_from_slice(&state.t.to_le_bytes());
    let fields: [&ScalarField; 6] = [
        &state.u.x,
        &state.u.y,
        &state.sigma.xx,
        &state.sigma.xy,
        &state.sigma.yx,
        &state.sigma.yy,
    ];
    for f in fields {
        for v in f.values() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(io_err(path))?;
        }
    }
    let mut file = fs::File::create(path).map_err(io_err(path))?;
    file.write_all(&buf).map_err(io_err(path))?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<State> {
    let malformed = |message: String| Error::Malformed { path: path.to_path_buf(), message };
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(io_err(path))?;
    if bytes.len() < 5 + 4 + 4 + 8 {
        return Err(malformed("file shorter than the fixed header".into()));
    }
    if &bytes[..5] != SNAPSHOT_MAGIC {
        return Err(malformed("bad magic; not a VEVP1 snapshot".into()));
    }
    let n = u32::from_le_bytes(bytes[5..9].try_into().expect("checked length")) as usize;
    let m = u32::from_le_bytes(bytes[9..13].try_into().expect("checked length")) as usize;
    let t = f64::from_le_bytes(bytes[13..21].try_into().expect("checked length"));
    let grid = SpectralGrid::with_collocation(n, m)?;
    let count = grid.len();
    let expected = 21 + 6 * count * 8;
    if bytes.len() != expected {
        return Err(malformed(format!(
            "size mismatch: {} bytes but N = {n}, M = {m} needs {expected}",
            bytes.len()
        )));
    }
    if !t.is_finite() {
        return Err(malformed(format!("non-finite time {t}")));
    }
    let mut offset = 21;
    let mut next_field = || -> Result<ScalarField> {
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let v = f64::from_le_bytes(
                bytes[offset..offset + 8].try_into().expect("length checked"),
            );
            if !v.is_finite() {
                return Err(malformed(format!("non-finite payload value {v}")));
            }
            values.push(v);
            offset += 8;
        }
        ScalarField::from_values(&grid, values)
    };
    let u = VectorField::new(next_field()?, next_field()?)?;
    let sigma = TensorField::new(next_field()?, next_field()?, next_field()?, next_field()?)?;
    State::new(u, sigma, t)
}
