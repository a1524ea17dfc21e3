//! File formats: canonical JSON (sorted keys, 17 significant digits) for
//! algebras, orbits, strings, representations and reports; CSV for tables.

use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::algebra::AlgebraParams;
use crate::dynamics::{NString, PeriodicOrbit, PlanePoint};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::repbuild::{RepKind, Representation};

/// Pretty JSON formatter that writes every float in scientific notation with
/// 17 significant digits, so values round-trip bit for bit.
struct CanonicalFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

macro_rules! delegate {
    ($($name:ident $(($arg:ident: $ty:ty))?),* $(,)?) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)?) -> io::Result<()> {
                self.inner.$name(w $(, $arg)?)
            }
        )*
    };
}

impl Formatter for CanonicalFormatter<'_> {
    delegate!(
        begin_array,
        end_array,
        begin_array_value(first: bool),
        end_array_value,
        begin_object,
        end_object,
        begin_object_key(first: bool),
        begin_object_value,
        end_object_value,
    );

    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
}

/// Serializes with object keys sorted and floats at full precision.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    // serde_json's default map is a BTreeMap, so going through Value sorts keys
    let v = serde_json::to_value(value)?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter { inner: PrettyFormatter::new() });
    v.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_canonical_json(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_algebra(path: &Path) -> Result<AlgebraParams> {
    read_json(path)
}

/// One orbit or string together with the algebra it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub kind: RepKind,
    pub period: usize,
    pub points: Vec<PlanePoint>,
    pub algebra: AlgebraParams,
}

impl TrajectoryRecord {
    pub fn from_orbit(orbit: &PeriodicOrbit, algebra: &AlgebraParams) -> Self {
        Self { kind: RepKind::Loop, period: orbit.period(), points: orbit.points().to_vec(), algebra: algebra.clone() }
    }

    pub fn from_string(string: &NString, algebra: &AlgebraParams) -> Self {
        Self { kind: RepKind::String, period: string.len(), points: string.points().to_vec(), algebra: algebra.clone() }
    }

    /// Validated orbit against `p` (the record's own algebra when `None`).
    pub fn to_orbit(&self, p: Option<&AlgebraParams>) -> Result<PeriodicOrbit> {
        if self.kind != RepKind::Loop {
            return Err(Error::InvalidOrbit(format!("record kind is {}", self.kind)));
        }
        PeriodicOrbit::new(p.unwrap_or(&self.algebra), self.points.clone())
    }

    pub fn to_nstring(&self, p: Option<&AlgebraParams>) -> Result<NString> {
        if self.kind != RepKind::String {
            return Err(Error::InvalidString(format!("record kind is {}", self.kind)));
        }
        NString::new(p.unwrap_or(&self.algebra), self.points.clone())
    }
}

/// Reads a trajectory file holding either one record or an array of them.
pub fn read_trajectories(path: &Path) -> Result<Vec<TrajectoryRecord>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(TrajectoryRecord),
        Many(Vec<TrajectoryRecord>),
    }
    Ok(match read_json::<OneOrMany>(path)? {
        OneOrMany::One(r) => vec![r],
        OneOrMany::Many(v) => v,
    })
}

/// Representation file: W split into row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepFile {
    pub dim: usize,
    pub w_re: Vec<Vec<f64>>,
    pub w_im: Vec<Vec<f64>>,
    pub kind: RepKind,
    pub phase: Option<f64>,
}

impl From<&Representation> for RepFile {
    fn from(rep: &Representation) -> Self {
        let w = rep.w();
        let n = rep.dim();
        Self {
            dim: n,
            w_re: (0..n).map(|i| (0..n).map(|j| w[(i, j)].re).collect()).collect(),
            w_im: (0..n).map(|i| (0..n).map(|j| w[(i, j)].im).collect()).collect(),
            kind: rep.kind(),
            phase: rep.phase(),
        }
    }
}

impl TryFrom<RepFile> for Representation {
    type Error = Error;

    fn try_from(f: RepFile) -> Result<Self> {
        let n = f.dim;
        let square = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if n == 0 || !square(&f.w_re) || !square(&f.w_im) {
            return Err(Error::Shape { expected: format!("{n}x{n} w_re and w_im"), got: "ragged matrix".into() });
        }
        let w = CMatrix::from_fn(n, n, |i, j| Complex64::new(f.w_re[i][j], f.w_im[i][j]));
        Representation::from_parts(w, f.kind, f.phase)
    }
}

pub fn write_rep(path: &Path, rep: &Representation) -> Result<()> {
    write_json(path, &RepFile::from(rep))
}

pub fn read_rep(path: &Path) -> Result<Representation> {
    read_json::<RepFile>(path)?.try_into()
}

/// Rows as CSV with a header taken from the field names.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of numbers is UTF-8"))
}
