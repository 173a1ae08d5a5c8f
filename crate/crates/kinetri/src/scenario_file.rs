//! JSON scenario files. Rationals are written as `"p/q"` or `"p"` strings;
//! loading also accepts bare JSON integers and decimal strings.

use std::path::Path;

use kinetri_core::motion::{Piece, Rational, Scenario, Trajectory};
use kinetri_core::Polynomial;
use serde::{Deserialize, Serialize};

use crate::decimal::parse_rational;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    fn value(&self) -> Result<Rational, FormatError> {
        match self {
            Num::Int(k) => Ok(Rational::from_integer((*k).into())),
            Num::Text(s) => parse_rational(s).map_err(FormatError::Invalid),
        }
    }

    fn of(r: &Rational) -> Self {
        Num::Text(r.to_string())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct FilePiece {
    interval: [Num; 2],
    x: Vec<Num>,
    y: Vec<Num>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FilePoint {
    pieces: Vec<FilePiece>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FileScenario {
    n: usize,
    window: [Num; 2],
    seed: u64,
    #[serde(default)]
    label: String,
    points: Vec<FilePoint>,
}

fn poly(cs: &[Num]) -> Result<Polynomial, FormatError> {
    Ok(Polynomial::new(cs.iter().map(Num::value).collect::<Result<_, _>>()?))
}

pub fn to_json(s: &Scenario) -> String {
    let file = FileScenario {
        n: s.len(),
        window: [Num::of(&s.window.0), Num::of(&s.window.1)],
        seed: s.seed,
        label: s.label.clone(),
        points: s
            .points
            .iter()
            .map(|p| FilePoint {
                pieces: p
                    .pieces()
                    .iter()
                    .map(|pc| FilePiece {
                        interval: [Num::of(&pc.start), Num::of(&pc.end)],
                        x: pc.x.coeffs().iter().map(Num::of).collect(),
                        y: pc.y.coeffs().iter().map(Num::of).collect(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("scenario serializes");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> Result<Scenario, FormatError> {
    let file: FileScenario = serde_json::from_str(text)?;
    if file.n != file.points.len() {
        return Err(FormatError::Invalid(format!("n = {} but {} points listed", file.n, file.points.len())));
    }
    let mut points = Vec::with_capacity(file.n);
    for (i, p) in file.points.iter().enumerate() {
        let pieces = p
            .pieces
            .iter()
            .map(|pc| Ok(Piece::new(pc.interval[0].value()?, pc.interval[1].value()?, poly(&pc.x)?, poly(&pc.y)?)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        points.push(Trajectory::new(pieces).map_err(|e| FormatError::Invalid(format!("point {}: {}", i, e)))?);
    }
    let window = (file.window[0].value()?, file.window[1].value()?);
    Scenario::new(points, window, file.seed, file.label).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn load(path: &Path) -> Result<Scenario, FormatError> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn save(s: &Scenario, path: &Path) -> Result<(), FormatError> {
    std::fs::write(path, to_json(s))?;
    Ok(())
}
