//! Arc-length sampled curves and their CSV / gnuplot serialization.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::ga::Rotor;
use crate::linalg;

/// One sample of a curve: arc length, position, unit tangent and, after
/// transport, the accumulated rotor.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub tau: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub rotor: Option<Rotor>,
}

impl TraceSample {
    pub fn new(tau: f64, x: Vec<f64>, u: Vec<f64>) -> Self {
        Self {
            tau,
            x,
            u,
            rotor: None,
        }
    }
}

/// A curve on a manifold sampled at (roughly) uniform arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTrace {
    samples: Vec<TraceSample>,
    step: f64,
}

impl CurveTrace {
    pub fn new(samples: Vec<TraceSample>, step: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("a trace needs at least one sample"));
        }
        let dim = samples[0].x.len();
        if samples.iter().any(|s| s.x.len() != dim || s.u.len() != dim) {
            return Err(Error::invalid("trace samples disagree on dimension"));
        }
        if samples.windows(2).any(|w| !(w[1].tau >= w[0].tau)) {
            return Err(Error::invalid("trace parameter must be non-decreasing"));
        }
        Ok(Self { samples, step })
    }

    /// Samples `f(τ)` at `count + 1` uniformly spaced parameters in `[0, length]`.
    pub fn from_fn(
        length: f64,
        count: usize,
        mut f: impl FnMut(f64) -> (Vec<f64>, Vec<f64>),
    ) -> Result<Self> {
        let count = count.max(1);
        let h = length / count as f64;
        let samples = (0..=count)
            .map(|k| {
                let tau = k as f64 * h;
                let (x, u) = f(tau);
                TraceSample::new(tau, x, u)
            })
            .collect();
        Self::new(samples, h)
    }

    /// Joins traces end to end; each piece starts where the previous one ended.
    pub fn concat(pieces: &[CurveTrace]) -> Result<Self> {
        let mut samples: Vec<TraceSample> = Vec::new();
        let mut offset = 0.0;
        for piece in pieces {
            let start = piece.samples[0].tau;
            for s in &piece.samples {
                let mut s = s.clone();
                s.tau = s.tau - start + offset;
                samples.push(s);
            }
            offset = samples.last().map_or(0.0, |s| s.tau);
        }
        let step = pieces.first().map_or(0.0, |p| p.step);
        Self::new(samples, step)
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn dim(&self) -> usize {
        self.samples[0].x.len()
    }

    pub fn first(&self) -> &TraceSample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TraceSample {
        &self.samples[self.samples.len() - 1]
    }

    /// Total parameter length.
    pub fn length(&self) -> f64 {
        self.last().tau - self.first().tau
    }

    pub fn positions(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.x.clone()).collect()
    }

    /// Whether the end point returns to the start within `tol`.
    pub fn is_closed(&self, tol: f64) -> bool {
        linalg::distance(&self.first().x, &self.last().x) <= tol
    }

    /// The same curve traversed backwards (tangents negated, rotors dropped).
    pub fn reversed(&self) -> Self {
        let end = self.last().tau;
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|s| TraceSample::new(end - s.tau, s.x.clone(), linalg::scale(&s.u, -1.0)))
            .collect();
        Self {
            samples,
            step: self.step,
        }
    }

    pub(crate) fn set_rotors(&mut self, rotors: Vec<Rotor>) {
        for (s, r) in self.samples.iter_mut().zip(rotors) {
            s.rotor = Some(r);
        }
    }

    fn header(&self, with_tangents: bool) -> Vec<String> {
        let n = self.dim();
        let mut cols = vec!["tau".to_string()];
        cols.extend((1..=n).map(|i| format!("x{i}")));
        if with_tangents {
            cols.extend((1..=n).map(|i| format!("u{i}")));
        }
        cols
    }

    fn row(&self, s: &TraceSample, with_tangents: bool) -> Vec<String> {
        let mut row = vec![format_float(s.tau)];
        row.extend(s.x.iter().map(|&v| format_float(v)));
        if with_tangents {
            row.extend(s.u.iter().map(|&v| format_float(v)));
        }
        row
    }

    /// CSV with header `tau,x1,…,xN[,u1,…,uN]`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W, with_tangents: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header(with_tangents))?;
        for s in &self.samples {
            w.write_record(self.row(s, with_tangents))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, with_tangents: bool) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, with_tangents)?;
        Ok(String::from_utf8(buf).expect("csv output is ASCII"))
    }

    /// Whitespace-separated columns under a `#` header line.
    pub fn write_gnuplot<W: Write>(&self, mut out: W, with_tangents: bool) -> Result<()> {
        writeln!(out, "# {}", self.header(with_tangents).join(" "))?;
        for s in &self.samples {
            writeln!(out, "{}", self.row(s, with_tangents).join(" "))?;
        }
        Ok(())
    }

    /// Reads the CSV format written by [`CurveTrace::write_csv`]. Without
    /// tangent columns the tangents are left empty (all zeros).
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        let cols: Vec<&str> = header.iter().collect();
        if cols.first() != Some(&"tau") {
            return Err(Error::invalid("trace CSV must start with a `tau` column"));
        }
        let n = cols.iter().filter(|c| c.starts_with('x')).count();
        let with_u = cols.len() == 1 + 2 * n;
        if n == 0 || !(cols.len() == 1 + n || with_u) {
            return Err(Error::invalid("trace CSV header is malformed"));
        }
        let mut samples = Vec::new();
        for record in r.records() {
            let record = record?;
            let values = record
                .iter()
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::invalid(format!("bad number `{f}` in trace CSV")))
                })
                .collect::<Result<Vec<f64>>>()?;
            let u = if with_u {
                values[1 + n..].to_vec()
            } else {
                vec![0.0; n]
            };
            samples.push(TraceSample::new(values[0], values[1..=n].to_vec(), u));
        }
        let step = if samples.len() > 1 {
            (samples[samples.len() - 1].tau - samples[0].tau) / (samples.len() - 1) as f64
        } else {
            0.0
        };
        Self::new(samples, step)
    }
}

/// Shortest `%.17g`-style rendering: 17 significant digits, trailing zeros
/// dropped, exponent form only for very large or small magnitudes.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, v);
        strip_zeros(&fixed).to_string()
    } else {
        format!("{}e{}", strip_zeros(mantissa), exp)
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
