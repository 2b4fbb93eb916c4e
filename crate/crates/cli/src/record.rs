use std::io::{self, Write};

use serde::Serialize;
use stable_ladder::{Error, EvalResult};

use crate::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ConvergenceFailure,
    InvalidParams,
}

impl Status {
    pub fn of(err: &Error) -> Status {
        if err.is_invalid_input() {
            Status::InvalidParams
        } else {
            Status::ConvergenceFailure
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::InvalidParams => 1,
            Status::ConvergenceFailure => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::ConvergenceFailure => "convergence_failure",
            Status::InvalidParams => "invalid_params",
        }
    }
}

/// One evaluated quantity. Field order is part of the output format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRecord {
    pub alpha: f64,
    pub rho: f64,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub theta: Option<f64>,
    pub quantity: &'static str,
    pub method: String,
    pub value: Option<f64>,
    pub abs_error_bound: Option<f64>,
    pub terms_or_nodes_used: Option<usize>,
    pub status: Status,
}

impl OutputRecord {
    pub fn new(alpha: f64, rho: f64, quantity: &'static str, method: String) -> Self {
        Self {
            alpha,
            rho,
            beta: None,
            gamma: None,
            eta: None,
            theta: None,
            quantity,
            method,
            value: None,
            abs_error_bound: None,
            terms_or_nodes_used: None,
            status: Status::Ok,
        }
    }

    pub fn with_outcome(mut self, outcome: &stable_ladder::Result<EvalResult>) -> Self {
        match outcome {
            Ok(r) => {
                self.method = r.method.to_string();
                self.value = Some(r.value);
                self.abs_error_bound = Some(r.abs_error_bound);
                self.terms_or_nodes_used = Some(r.terms_or_nodes_used);
                self.status = Status::Ok;
            }
            Err(e) => self.status = Status::of(e),
        }
        self
    }
}

/// Shortest round-trip text for a float.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_else(|| "-".into())
}

/// Writes records in the selected format; CSV gets a single header.
pub enum Emitter<W: Write> {
    Json(W),
    Text(W),
    Csv(Box<csv::Writer<W>>),
}

impl<W: Write> Emitter<W> {
    pub fn new(format: Format, out: W) -> Self {
        match format {
            Format::Json => Emitter::Json(out),
            Format::Text => Emitter::Text(out),
            Format::Csv => Emitter::Csv(Box::new(csv::Writer::from_writer(out))),
        }
    }

    pub fn emit(&mut self, rec: &OutputRecord) -> io::Result<()> {
        match self {
            Emitter::Json(out) => {
                let line = serde_json::to_string(rec).map_err(io::Error::other)?;
                writeln!(out, "{line}")
            }
            Emitter::Text(out) => writeln!(out, "{}", text_line(rec)),
            Emitter::Csv(w) => w.serialize(rec).map_err(io::Error::other),
        }
    }

    pub fn finish(self) -> io::Result<()> {
        match self {
            Emitter::Json(mut out) | Emitter::Text(mut out) => out.flush(),
            Emitter::Csv(mut w) => w.flush(),
        }
    }
}

fn text_line(rec: &OutputRecord) -> String {
    let mut args = Vec::new();
    for (name, v) in [("beta", rec.beta), ("gamma", rec.gamma), ("eta", rec.eta), ("theta", rec.theta)] {
        if let Some(v) = v {
            args.push(format!("{name}={}", fmt_f64(v)));
        }
    }
    let head = format!(
        "{}(alpha={}, rho={}, {})",
        rec.quantity,
        fmt_f64(rec.alpha),
        fmt_f64(rec.rho),
        args.join(", ")
    );
    match rec.status {
        Status::Ok => format!(
            "{head} = {} +/- {}  [{}, {} terms/nodes]",
            fmt_opt(rec.value),
            fmt_opt(rec.abs_error_bound),
            rec.method,
            rec.terms_or_nodes_used.unwrap_or(0)
        ),
        s => format!("{head}: {} [{}]", s.as_str(), rec.method),
    }
}
