//! JSON file formats for states, measurements, instruments and phenomena.
//!
//! Complex entries are written either as a number or as a `[re, im]` pair.
//! Semantic checks run during deserialization so every diagnostic carries the
//! line and column where the offending value ends.

use std::cell::Cell;
use std::fmt;
use std::path::{Path, PathBuf};

use bohrdisc_core::measure::{Instrument, JointTable, Povm};
use bohrdisc_core::phenomena::{LabeledPovm, Phenomenon, Setting};
use bohrdisc_core::qcore::{BipartiteState, CMatrix, PureState, C64};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::CliError;

thread_local! {
    static TABLE_TOL: Cell<f64> = const { Cell::new(1e-9) };
}

/// Normalization tolerance used for frequency tables read on this thread.
pub fn set_table_tolerance(tol: f64) {
    TABLE_TOL.with(|t| t.set(tol));
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complex(pub C64);

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Complex;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a [re, im] pair")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Complex, E> {
                Ok(Complex(C64::new(v, 0.0)))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Complex, E> {
                Ok(Complex(C64::new(v as f64, 0.0)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Complex, E> {
                Ok(Complex(C64::new(v as f64, 0.0)))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Complex, A::Error> {
                let re: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Complex(C64::new(re, im)))
            }
        }
        d.deserialize_any(V)
    }
}

/// Rectangular matrix given as a list of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix(pub CMatrix);

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Matrix;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a list of equally long rows")
            }

            // Rows are checked as they arrive so a ragged row is reported where it ends.
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Matrix, A::Error> {
                let mut data = Vec::new();
                let mut cols = None;
                let mut rows = 0;
                while let Some(row) = seq.next_element::<Vec<Complex>>()? {
                    let c = *cols.get_or_insert(row.len());
                    if row.len() != c || c == 0 {
                        return Err(de::Error::custom(format!(
                            "row {rows} has {} entries, expected {}",
                            row.len(),
                            c.max(1)
                        )));
                    }
                    data.extend(row.into_iter().map(|z| z.0));
                    rows += 1;
                }
                let cols = cols.ok_or_else(|| de::Error::custom("matrix must not be empty"))?;
                CMatrix::new(rows, cols, data)
                    .map(Matrix)
                    .map_err(de::Error::custom)
            }
        }
        d.deserialize_seq(V)
    }
}

/// Serializable form of a matrix: rows of `[re, im]` pairs.
pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    dims: Option<[usize; 2]>,
    matrix: Option<Matrix>,
    #[serde(alias = "vector")]
    amplitudes: Option<Vec<Complex>>,
}

/// A density operator, given as `matrix` or as normalized pure-state `amplitudes`.
#[derive(Debug, Clone, Deserialize)]
#[serde(try_from = "RawState")]
pub struct StateFile(pub BipartiteState);

fn infer_dims(n: usize, dims: Option<[usize; 2]>) -> Result<(usize, usize), String> {
    match dims {
        Some([a, b]) if a * b == n => Ok((a, b)),
        Some([a, b]) => Err(format!("dims {a}x{b} do not match size {n}")),
        None => {
            let a = (1..=n).find(|a| a * a >= n).unwrap_or(1);
            if a * a == n {
                Ok((a, a))
            } else {
                Err(format!("size {n} is not a square; give \"dims\""))
            }
        }
    }
}

impl TryFrom<RawState> for StateFile {
    type Error = String;

    fn try_from(raw: RawState) -> Result<Self, String> {
        match (raw.matrix, raw.amplitudes) {
            (Some(m), None) => {
                let (a, b) = infer_dims(m.0.rows(), raw.dims)?;
                BipartiteState::new(a, b, m.0)
                    .map(StateFile)
                    .map_err(|e| e.to_string())
            }
            (None, Some(v)) => {
                let (a, b) = infer_dims(v.len(), raw.dims)?;
                let psi = PureState::new(a, b, v.into_iter().map(|z| z.0).collect())
                    .map_err(|e| e.to_string())?;
                Ok(StateFile(psi.density()))
            }
            _ => Err("give exactly one of \"matrix\" or \"amplitudes\"".into()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasurement {
    label: Option<String>,
    quantity: Option<String>,
    #[serde(alias = "povm")]
    effects: Option<Vec<Matrix>>,
    basis: Option<Matrix>,
    spin: Option<[f64; 3]>,
}

/// A labeled POVM given by its `effects`, a projective `basis` (columns), or a qubit `spin` direction.
#[derive(Debug, Clone, Deserialize)]
#[serde(try_from = "RawMeasurement")]
pub struct MeasurementFile {
    pub label: Option<String>,
    pub quantity: Option<String>,
    pub povm: Povm,
}

impl TryFrom<RawMeasurement> for MeasurementFile {
    type Error = String;

    fn try_from(raw: RawMeasurement) -> Result<Self, String> {
        let povm = match (raw.effects, raw.basis, raw.spin) {
            (Some(e), None, None) => {
                Povm::new(e.into_iter().map(|m| m.0).collect()).map_err(|e| e.to_string())?
            }
            (None, Some(b), None) => {
                let u = b.0;
                let gram = u.adjoint().matmul(&u);
                if !u.is_square() || gram.distance(&CMatrix::identity(u.cols())) > 1e-9 {
                    return Err("basis columns are not orthonormal".into());
                }
                Povm::projective(&u)
            }
            (None, None, Some(n)) => {
                let norm = n.iter().map(|x| x * x).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(format!("spin direction has norm {norm}, expected 1"));
                }
                Povm::spin(n)
            }
            _ => return Err("give exactly one of \"effects\", \"basis\" or \"spin\"".into()),
        };
        Ok(MeasurementFile {
            label: raw.label,
            quantity: raw.quantity,
            povm,
        })
    }
}

impl MeasurementFile {
    /// Fills missing labels from `fallback`.
    pub fn labeled(self, fallback: &str) -> LabeledPovm {
        let label = self.label.unwrap_or_else(|| fallback.to_string());
        let quantity = self.quantity.unwrap_or_else(|| label.clone());
        LabeledPovm::new(label, quantity, self.povm)
    }
}

/// One measurement or a list of them.
#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(MeasurementFile),
    Many(Vec<MeasurementFile>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReprepare {
    basis: Matrix,
    inner: MeasurementFile,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstrument {
    label: Option<String>,
    #[serde(alias = "instrument")]
    kraus: Option<Vec<Vec<Matrix>>>,
    lueders: Option<MeasurementFile>,
    measure_and_reprepare: Option<RawReprepare>,
}

/// An instrument given by `kraus` operators per outcome, as the `lueders` instrument of a
/// measurement, or as `measure_and_reprepare` in a basis.
#[derive(Debug, Clone, Deserialize)]
#[serde(try_from = "RawInstrument")]
pub struct InstrumentFile {
    pub label: Option<String>,
    pub instrument: Instrument,
}

impl TryFrom<RawInstrument> for InstrumentFile {
    type Error = String;

    fn try_from(raw: RawInstrument) -> Result<Self, String> {
        let instrument = match (raw.kraus, raw.lueders, raw.measure_and_reprepare) {
            (Some(k), None, None) => Instrument::new(
                k.into_iter()
                    .map(|ks| ks.into_iter().map(|m| m.0).collect())
                    .collect(),
            )
            .map_err(|e| e.to_string())?,
            (None, Some(m), None) => Instrument::lueders(&m.povm),
            (None, None, Some(r)) => Instrument::measure_and_reprepare(&r.basis.0, &r.inner.povm),
            _ => {
                return Err(
                    "give exactly one of \"kraus\", \"lueders\" or \"measure_and_reprepare\""
                        .into(),
                )
            }
        };
        Ok(InstrumentFile {
            label: raw.label,
            instrument,
        })
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum SettingSpec {
    Label(String),
    Full {
        label: String,
        #[serde(alias = "group")]
        quantity: Option<String>,
        outcomes: Option<usize>,
    },
}

impl SettingSpec {
    fn parts(&self) -> (String, String) {
        match self {
            SettingSpec::Label(l) => (l.clone(), l.clone()),
            SettingSpec::Full {
                label, quantity, ..
            } => (
                label.clone(),
                quantity.clone().unwrap_or_else(|| label.clone()),
            ),
        }
    }

    fn outcomes(&self) -> Option<usize> {
        match self {
            SettingSpec::Label(_) => None,
            SettingSpec::Full { outcomes, .. } => *outcomes,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhenomenon {
    alice: Vec<SettingSpec>,
    bob: Vec<SettingSpec>,
    /// `tables[a][b]` lists the rows `p(A, B)` for `A` over Alice's outcomes.
    tables: Vec<Vec<Vec<Vec<f64>>>>,
}

/// Frequency tables for every pair of settings.
#[derive(Debug, Clone, Deserialize)]
#[serde(try_from = "RawPhenomenon")]
pub struct PhenomenonFile(pub Phenomenon);

impl TryFrom<RawPhenomenon> for PhenomenonFile {
    type Error = String;

    fn try_from(raw: RawPhenomenon) -> Result<Self, String> {
        let tol = TABLE_TOL.with(Cell::get);
        if raw.tables.len() != raw.alice.len() {
            return Err(format!(
                "{} table rows for {} Alice settings",
                raw.tables.len(),
                raw.alice.len()
            ));
        }
        let mut tables = Vec::with_capacity(raw.alice.len());
        for (a, row) in raw.tables.iter().enumerate() {
            if row.len() != raw.bob.len() {
                return Err(format!(
                    "Alice setting {a}: {} tables for {} Bob settings",
                    row.len(),
                    raw.bob.len()
                ));
            }
            let mut out = Vec::with_capacity(row.len());
            for (b, t) in row.iter().enumerate() {
                out.push(
                    JointTable::from_rows(t, tol).map_err(|e| format!("table ({a}, {b}): {e}"))?,
                );
            }
            tables.push(out);
        }
        let settings = |specs: &[SettingSpec], outcomes: &dyn Fn(usize) -> usize| -> Vec<Setting> {
            specs
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let (l, q) = s.parts();
                    Setting::new(l, q, s.outcomes().unwrap_or_else(|| outcomes(i)))
                })
                .collect()
        };
        let first_col = |b: usize| {
            tables
                .first()
                .map_or(0, |row: &Vec<JointTable>| row[b].cols())
        };
        let first_row = |a: usize| tables[a].first().map_or(0, JointTable::rows);
        let alice = settings(&raw.alice, &first_row);
        let bob = settings(&raw.bob, &first_col);
        Phenomenon::new(alice, bob, tables, tol)
            .map(PhenomenonFile)
            .map_err(|e| e.to_string())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("m")
        .to_string()
}

pub fn load_state(path: &Path) -> Result<BipartiteState, CliError> {
    parse::<StateFile>(path).map(|s| s.0)
}

/// Measurements from a file holding one object or a list; unlabeled entries take the file stem.
pub fn load_measurements(path: &Path) -> Result<Vec<LabeledPovm>, CliError> {
    let base = stem(path);
    Ok(match parse::<OneOrMany>(path)? {
        OneOrMany::One(m) => vec![m.labeled(&base)],
        OneOrMany::Many(ms) => ms
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.labeled(&format!("{base}{i}")))
            .collect(),
    })
}

pub fn load_instrument(path: &Path) -> Result<(String, Instrument), CliError> {
    let f = parse::<InstrumentFile>(path)?;
    Ok((f.label.unwrap_or_else(|| stem(path)), f.instrument))
}

pub fn load_phenomenon(path: &Path) -> Result<Phenomenon, CliError> {
    parse::<PhenomenonFile>(path).map(|p| p.0)
}

/// Path of the JSON config named by `BOHRDISC_CONFIG`, if set.
pub fn config_path() -> Option<PathBuf> {
    std::env::var_os("BOHRDISC_CONFIG").map(PathBuf::from)
}

/// Defaults read from the config file; command-line flags take precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub tol: Option<f64>,
    pub max_iterations: Option<usize>,
    pub opt_tol: Option<f64>,
    pub format: Option<String>,
}

pub fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    parse(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(text: &str) -> Result<BipartiteState, serde_json::Error> {
        serde_json::from_str::<StateFile>(text).map(|s| s.0)
    }

    #[test]
    fn pure_and_mixed_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = state(&format!("{{\"amplitudes\": [[{h}, 0], 0, 0, {h}]}}")).unwrap();
        assert_eq!(
            state(&format!("{{\"vector\": [{h}, 0, 0, {h}]}}"))
                .unwrap()
                .dims(),
            (2, 2)
        );
        assert_eq!(s.dims(), (2, 2));
        assert!((s.purity() - 1.0).abs() < 1e-12);
        let s = state("{\"matrix\": [[0.5, 0, 0, [0, 0.5]], [0, 0, 0, 0], [0, 0, 0, 0], [[0, -0.5], 0, 0, 0.5]]}").unwrap();
        assert_eq!(s.dims(), (2, 2));
        assert!(state("{\"dims\": [2, 1], \"matrix\": [[0.5, 0], [0, 0.5]]}").is_err());
    }

    #[test]
    fn ragged_matrix_reports_position() {
        let e = state("{\n  \"matrix\": [[1, 0],\n             [0]]\n}").unwrap_err();
        assert_eq!(e.line(), 3);
        assert!(e.to_string().contains("row 1 has 1 entries"));
    }

    #[test]
    fn invalid_density_is_rejected() {
        assert!(
            state("{\"matrix\": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]}")
                .is_err()
        );
        assert!(state("{\"dims\": [3, 2], \"matrix\": [[1, 0], [0, 0]]}").is_err());
        assert!(state("{\"matrix\": [[1]], \"vector\": [1]}").is_err());
    }

    #[test]
    fn measurements_and_instruments() {
        let m: MeasurementFile =
            serde_json::from_str("{\"label\": \"z\", \"spin\": [0, 0, 1]}").unwrap();
        assert_eq!(m.povm.outcomes(), 2);
        let m: MeasurementFile = serde_json::from_str("{\"basis\": [[1, 0], [0, 1]]}").unwrap();
        assert_eq!(m.labeled("f").label, "f");
        assert!(
            serde_json::from_str::<MeasurementFile>("{\"effects\": [[[1, 0], [0, 0]]]}").is_err()
        );
        let i: InstrumentFile =
            serde_json::from_str("{\"lueders\": {\"spin\": [1, 0, 0]}}").unwrap();
        assert_eq!(i.instrument.outcomes(), 2);
        let i: InstrumentFile =
            serde_json::from_str("{\"kraus\": [[[[1, 0], [0, 0]]], [[[0, 0], [0, 1]]]]}").unwrap();
        assert_eq!(i.instrument.outcomes(), 2);
    }

    #[test]
    fn phenomenon_tables() {
        let text =
            r#"{"alice": ["z"], "bob": [{"label": "z"}], "tables": [[[[0.5, 0], [0, 0.5]]]]}"#;
        let p: PhenomenonFile = serde_json::from_str(text).unwrap();
        assert_eq!(p.0.alice_settings()[0].outcomes, 2);
        let bad = r#"{"alice": ["z"], "bob": ["z"], "tables": [[[[0.5, 0], [0, 0.6]]]]}"#;
        assert!(serde_json::from_str::<PhenomenonFile>(bad).is_err());
        set_table_tolerance(0.2);
        assert!(serde_json::from_str::<PhenomenonFile>(bad).is_ok());
        set_table_tolerance(1e-9);
    }
}
