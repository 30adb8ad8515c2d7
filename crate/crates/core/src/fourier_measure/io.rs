//! Plain-text potential format.
//!
//! ```text
//! # comment
//! [component 1]
//! k1 k2 k3 re im
//! [component 3]
//! 0 1 0 0.5 0
//! ```
//!
//! or, for a linear potential, a `[linear]` section holding three rows of
//! three numbers (`a_i = Σ_j α_ij x_j`). A `[measure]` section holds one
//! measure (scalar potentials, wave packets).

use super::{LinearVectorPotential, PointMassMeasure, VectorPotentialFourier};
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec<T: Real> {
    Fourier(VectorPotentialFourier<T>),
    Linear(LinearVectorPotential<T>),
}

enum Section {
    None,
    Component(usize),
    Linear,
    Measure,
}

fn nums(line: &str, lineno: usize, want: usize) -> Result<Vec<f64>> {
    let v: std::result::Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
    let v = v.map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })?;
    if v.len() != want {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("expected {want} numbers, found {}", v.len()),
        });
    }
    Ok(v)
}

struct Parsed {
    comps: [Vec<([f64; 3], Complex<f64>)>; 3],
    linear: Vec<[f64; 3]>,
    measure: Vec<([f64; 3], Complex<f64>)>,
    saw_component: bool,
    saw_linear: bool,
    saw_measure: bool,
}

fn parse_all(text: &str) -> Result<Parsed> {
    let mut p = Parsed {
        comps: Default::default(),
        linear: Vec::new(),
        measure: Vec::new(),
        saw_component: false,
        saw_linear: false,
        saw_measure: false,
    };
    let mut sec = Section::None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            let name = line.trim_start_matches('[').trim_end_matches(']').trim();
            sec = match name.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["component", j] => {
                    let j: usize = j.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("bad component index {j}"),
                    })?;
                    if !(1..=3).contains(&j) {
                        return Err(Error::Parse { line: lineno, msg: "component must be 1, 2 or 3".into() });
                    }
                    p.saw_component = true;
                    Section::Component(j - 1)
                }
                ["linear"] => {
                    p.saw_linear = true;
                    Section::Linear
                }
                ["measure"] => {
                    p.saw_measure = true;
                    Section::Measure
                }
                _ => return Err(Error::Parse { line: lineno, msg: format!("unknown section [{name}]") }),
            };
            continue;
        }
        match sec {
            Section::None => {
                return Err(Error::Parse { line: lineno, msg: "data before any section header".into() })
            }
            Section::Component(j) => {
                let v = nums(line, lineno, 5)?;
                p.comps[j].push(([v[0], v[1], v[2]], Complex::new(v[3], v[4])));
            }
            Section::Measure => {
                let v = nums(line, lineno, 5)?;
                p.measure.push(([v[0], v[1], v[2]], Complex::new(v[3], v[4])));
            }
            Section::Linear => {
                let v = nums(line, lineno, 3)?;
                if p.linear.len() == 3 {
                    return Err(Error::Parse { line: lineno, msg: "linear block has more than 3 rows".into() });
                }
                p.linear.push([v[0], v[1], v[2]]);
            }
        }
    }
    Ok(p)
}

fn to_t<T: Real>(atoms: &[([f64; 3], Complex<f64>)]) -> Vec<([T; 3], Complex<T>)> {
    atoms
        .iter()
        .map(|(k, w)| ([T::lit(k[0]), T::lit(k[1]), T::lit(k[2])], Complex::new(T::lit(w.re), T::lit(w.im))))
        .collect()
}

/// Parses a vector potential. Fourier potentials are checked for realness.
pub fn parse_potential<T: Real>(text: &str) -> Result<PotentialSpec<T>> {
    let p = parse_all(text)?;
    match (p.saw_component, p.saw_linear) {
        (true, true) => Err(Error::Parse { line: 0, msg: "both [component] and [linear] sections".into() }),
        (false, false) => Err(Error::Parse { line: 0, msg: "no potential section".into() }),
        (false, true) => {
            if p.linear.len() != 3 {
                return Err(Error::Parse { line: 0, msg: "linear block needs 3 rows".into() });
            }
            let mut a = [[T::zero(); 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    a[i][j] = T::lit(p.linear[i][j]);
                }
            }
            Ok(PotentialSpec::Linear(LinearVectorPotential::derive(a)))
        }
        (true, false) => {
            let mu = [
                PointMassMeasure::new(to_t(&p.comps[0])),
                PointMassMeasure::new(to_t(&p.comps[1])),
                PointMassMeasure::new(to_t(&p.comps[2])),
            ];
            Ok(PotentialSpec::Fourier(VectorPotentialFourier::real(mu)?))
        }
    }
}

/// Parses a single `[measure]` section.
pub fn parse_measure<T: Real>(text: &str) -> Result<PointMassMeasure<T>> {
    let p = parse_all(text)?;
    if !p.saw_measure {
        return Err(Error::Parse { line: 0, msg: "no [measure] section".into() });
    }
    Ok(PointMassMeasure::new(to_t(&p.measure)))
}

fn write_atoms<T: Real>(out: &mut String, m: &PointMassMeasure<T>) {
    for (k, w) in m.atoms() {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            k[0].to_f64_lossy(),
            k[1].to_f64_lossy(),
            k[2].to_f64_lossy(),
            w.re.to_f64_lossy(),
            w.im.to_f64_lossy()
        );
    }
}

pub fn write_potential<T: Real>(spec: &PotentialSpec<T>) -> String {
    let mut out = String::new();
    match spec {
        PotentialSpec::Fourier(p) => {
            for (j, m) in p.mu().iter().enumerate() {
                let _ = writeln!(out, "[component {}]", j + 1);
                write_atoms(&mut out, m);
            }
        }
        PotentialSpec::Linear(l) => {
            out.push_str("[linear]\n");
            for row in &l.alpha {
                let _ = writeln!(
                    out,
                    "{} {} {}",
                    row[0].to_f64_lossy(),
                    row[1].to_f64_lossy(),
                    row[2].to_f64_lossy()
                );
            }
        }
    }
    out
}

pub fn write_measure<T: Real>(m: &PointMassMeasure<T>) -> String {
    let mut out = String::from("[measure]\n");
    write_atoms(&mut out, m);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_round_trip() {
        let text = "# cos(x2) in the first component\n[component 1]\n0 1 0 0.5 0\n0 -1 0 0.5 0\n";
        let spec = parse_potential::<f64>(text).unwrap();
        let again = parse_potential::<f64>(&write_potential(&spec)).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn linear_round_trip() {
        let text = "[linear]\n0 -0.5 0\n0.5 0 0\n0 0 0\n";
        let spec = parse_potential::<f64>(text).unwrap();
        match &spec {
            PotentialSpec::Linear(l) => assert_eq!(l.b_field, [0.0, 0.0, 1.0]),
            _ => panic!("expected linear"),
        }
        assert_eq!(parse_potential::<f64>(&write_potential(&spec)).unwrap(), spec);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_potential::<f64>("[component 1]\n1 2 3 4\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse_potential::<f64>("[component 1]\n1 0 0 1 0\n").is_err());
        assert!(parse_potential::<f64>("[bogus]\n").is_err());
    }

    #[test]
    fn measure_round_trip() {
        let m = PointMassMeasure::<f64>::cosine([1.0, 2.0, 0.0], 0.3);
        assert_eq!(parse_measure::<f64>(&write_measure(&m)).unwrap(), m);
    }
}
