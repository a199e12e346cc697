//! Boat-speed polar table.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Boat speed by true wind angle (rows) and true wind speed (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct PolarTable<T> {
    pub twa_breakpoints: Vec<T>,
    pub tws_breakpoints: Vec<T>,
    /// Row-major, `twa_breakpoints.len() x tws_breakpoints.len()`, m/s.
    pub speeds: Vec<T>,
    pub no_go_angle: T,
}

/// Dimensionless speed ratio at each default TWA breakpoint.
const DEFAULT_SHAPE: [(f64, f64); 11] = [
    (40.0, 0.42),
    (52.0, 0.55),
    (60.0, 0.62),
    (75.0, 0.69),
    (90.0, 0.72),
    (110.0, 0.74),
    (120.0, 0.73),
    (135.0, 0.66),
    (150.0, 0.58),
    (165.0, 0.52),
    (180.0, 0.48),
];
const DEFAULT_TWS: [f64; 5] = [2.0, 4.0, 6.0, 8.0, 10.0];

impl<T: Scalar> Default for PolarTable<T> {
    fn default() -> Self {
        let twa: Vec<T> = DEFAULT_SHAPE.iter().map(|&(a, _)| T::lit(a)).collect();
        let tws: Vec<T> = DEFAULT_TWS.iter().map(|&s| T::lit(s)).collect();
        let speeds = DEFAULT_SHAPE
            .iter()
            .flat_map(|&(_, f)| DEFAULT_TWS.iter().map(move |&s| T::lit(s * f)))
            .collect();
        Self { twa_breakpoints: twa, tws_breakpoints: tws, speeds, no_go_angle: T::lit(40.0) }
    }
}

/// Bracketing indices and blend weight for `x` in an ascending breakpoint list, clamped.
fn bracket<T: Scalar>(bps: &[T], x: T) -> (usize, usize, T) {
    let n = bps.len();
    if n == 1 || x <= bps[0] {
        return (0, 0, T::zero());
    }
    if x >= bps[n - 1] {
        return (n - 1, n - 1, T::zero());
    }
    let hi = bps.partition_point(|&b| b <= x).min(n - 1);
    let lo = hi - 1;
    (lo, hi, (x - bps[lo]) / (bps[hi] - bps[lo]))
}

impl<T: Scalar> PolarTable<T> {
    pub fn new(twa: Vec<T>, tws: Vec<T>, speeds: Vec<T>, no_go_angle: T) -> Result<Self> {
        let t = Self { twa_breakpoints: twa, tws_breakpoints: tws, speeds, no_go_angle };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let ascending = |v: &[T]| v.windows(2).all(|w| w[0] < w[1]);
        if self.twa_breakpoints.is_empty() || self.tws_breakpoints.is_empty() {
            return Err(Error::InvalidPolar("empty breakpoint list".into()));
        }
        if !ascending(&self.twa_breakpoints) || !ascending(&self.tws_breakpoints) {
            return Err(Error::InvalidPolar("breakpoints must be strictly ascending".into()));
        }
        let (first, last) = (self.twa_breakpoints[0], *self.twa_breakpoints.last().unwrap());
        if !(first > T::zero()) || last > T::lit(180.0) {
            return Err(Error::InvalidPolar("TWA breakpoints must lie in (0, 180]".into()));
        }
        if !(self.tws_breakpoints[0] > T::zero()) {
            return Err(Error::InvalidPolar("TWS breakpoints must be positive".into()));
        }
        if self.speeds.len() != self.twa_breakpoints.len() * self.tws_breakpoints.len() {
            return Err(Error::InvalidPolar("speed grid has the wrong shape".into()));
        }
        if self.speeds.iter().any(|&s| !(s >= T::zero()) || !s.is_finite()) {
            return Err(Error::InvalidPolar("boat speeds must be finite and non-negative".into()));
        }
        if !(self.no_go_angle > T::zero() && self.no_go_angle < T::lit(180.0)) {
            return Err(Error::InvalidPolar("no-go angle must lie in (0, 180)".into()));
        }
        for &tws in &self.tws_breakpoints {
            if !(self.vpp(tws, self.no_go_angle) > T::zero()) {
                return Err(Error::InvalidPolar(format!(
                    "zero boat speed at the no-go boundary for TWS {tws}"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    fn at(&self, a: usize, s: usize) -> T {
        self.speeds[a * self.tws_breakpoints.len() + s]
    }

    /// Bilinear lookup. Angles clamp to the table edges; wind speeds above the
    /// table clamp, below the first breakpoint they scale linearly to zero.
    pub fn vpp(&self, tws: T, twa: T) -> T {
        if !(tws > T::zero()) {
            return T::zero();
        }
        let first_tws = self.tws_breakpoints[0];
        let (scale, tws) = if tws < first_tws { (tws / first_tws, first_tws) } else { (T::one(), tws) };
        let (a0, a1, fa) = bracket(&self.twa_breakpoints, twa);
        let (s0, s1, fs) = bracket(&self.tws_breakpoints, tws);
        let row = |a: usize| self.at(a, s0) * (T::one() - fs) + self.at(a, s1) * fs;
        scale * (row(a0) * (T::one() - fa) + row(a1) * fa)
    }

    /// Reads the CSV layout: first row is `<label>,tws_1,...`, every further
    /// row is `twa,speed_1,...`.
    pub fn from_csv_reader<R: Read>(reader: R, no_go_angle: T) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let parse = |s: &str| -> Result<T> {
            s.parse::<f64>()
                .map(T::lit)
                .map_err(|_| Error::InvalidPolar(format!("not a number: {s:?}")))
        };
        let mut records = rdr.records();
        let header = records
            .next()
            .ok_or_else(|| Error::InvalidPolar("missing header row".into()))?
            .map_err(|e| Error::PolarIo(e.to_string()))?;
        let tws = header.iter().skip(1).map(parse).collect::<Result<Vec<_>>>()?;
        let mut twa = Vec::new();
        let mut speeds = Vec::new();
        for rec in records {
            let rec = rec.map_err(|e| Error::PolarIo(e.to_string()))?;
            let mut it = rec.iter();
            let angle = it.next().ok_or_else(|| Error::InvalidPolar("empty row".into()))?;
            twa.push(parse(angle)?);
            let row = it.map(parse).collect::<Result<Vec<_>>>()?;
            if row.len() != tws.len() {
                return Err(Error::InvalidPolar(format!(
                    "row for TWA {angle} has {} speeds, expected {}",
                    row.len(),
                    tws.len()
                )));
            }
            speeds.extend(row);
        }
        Self::new(twa, tws, speeds, no_go_angle)
    }

    pub fn from_csv_path(path: &Path, no_go_angle: T) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::PolarIo(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(f, no_go_angle)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "twa/tws")?;
        for s in &self.tws_breakpoints {
            write!(out, ",{s}")?;
        }
        writeln!(out)?;
        for (a, twa) in self.twa_breakpoints.iter().enumerate() {
            write!(out, "{twa}")?;
            for s in 0..self.tws_breakpoints.len() {
                write!(out, ",{}", self.at(a, s))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}
