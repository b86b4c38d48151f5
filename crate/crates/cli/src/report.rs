//! Reports: a verdict, text lines, a structured payload and the exit code.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use uext_core::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Usage,
    Overflow,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Usage => 2,
            Verdict::Overflow => 3,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Usage => "ERROR",
            Verdict::Overflow => "OVERFLOW",
        }
    }

    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// A failure that ends a command early.
#[derive(Debug)]
pub struct Failure {
    pub verdict: Verdict,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let verdict = match e {
            Error::Limit { .. } => Verdict::Overflow,
            Error::Disagreement(_) => Verdict::Fail,
            _ => Verdict::Usage,
        };
        Failure { verdict, message: e.to_string() }
    }
}

impl From<uext_core::error::ParseError> for Failure {
    fn from(e: uext_core::error::ParseError) -> Self {
        Failure { verdict: Verdict::Usage, message: format!("parse error at {e}") }
    }
}

pub fn usage(message: impl Into<String>) -> Failure {
    Failure { verdict: Verdict::Usage, message: message.into() }
}

pub fn overflow(message: impl Into<String>) -> Failure {
    Failure { verdict: Verdict::Overflow, message: message.into() }
}

pub type Outcome<T> = Result<T, Failure>;

#[derive(Clone, Debug)]
pub struct Input {
    pub path: PathBuf,
    pub text: String,
    pub sha256: String,
}

pub fn read_input(path: &Path) -> Outcome<Input> {
    let bytes = std::fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| usage(format!("{}: not UTF-8", path.display())))?;
    Ok(Input { path: path.to_path_buf(), text, sha256 })
}

/// What a command produced. `payload` is file content (a formatted frame or
/// presentation) that `-o` writes out instead of printing.
#[derive(Debug)]
pub struct Report {
    pub command: Vec<String>,
    pub inputs: Vec<Input>,
    pub verdict: Verdict,
    pub lines: Vec<String>,
    pub result: Value,
    pub payload: Option<String>,
    pub elapsed: Option<Duration>,
}

impl Report {
    pub fn new(verdict: Verdict) -> Self {
        Report {
            command: Vec::new(),
            inputs: Vec::new(),
            verdict,
            lines: Vec::new(),
            result: Value::Null,
            payload: None,
            elapsed: None,
        }
    }

    pub fn line(mut self, l: impl Into<String>) -> Self {
        self.lines.push(l.into());
        self
    }

    pub fn result(mut self, v: Value) -> Self {
        self.result = v;
        self
    }

    pub fn payload(mut self, p: String) -> Self {
        self.payload = Some(p);
        self
    }

    pub fn failure(f: Failure) -> Self {
        let mut r = Report::new(f.verdict);
        r.lines.push(format!("error: {}", f.message));
        r.result = json!({ "error": f.message });
        r
    }

    pub fn to_json(&self, include_payload: bool) -> String {
        let inputs: Vec<Value> =
            self.inputs.iter().map(|i| json!({ "path": i.path.display().to_string(), "sha256": i.sha256 })).collect();
        let mut v = json!({
            "command": self.command,
            "inputs": inputs,
            "verdict": self.verdict.label(),
            "exit": self.verdict.exit_code(),
            "result": self.result,
        });
        if include_payload {
            if let Some(p) = &self.payload {
                v["payload"] = Value::String(p.clone());
            }
        }
        if let Some(d) = self.elapsed {
            v["timing_ms"] = json!(d.as_secs_f64() * 1000.0);
        }
        serde_json::to_string_pretty(&v).expect("json values serialize") + "\n"
    }

    /// Plain text: payload (unless written elsewhere), then the report lines.
    pub fn to_text(&self, include_payload: bool) -> String {
        let mut out = String::new();
        if include_payload {
            if let Some(p) = &self.payload {
                out.push_str(p);
            }
        }
        for l in &self.lines {
            let _ = writeln!(out, "{l}");
        }
        if self.payload.is_none() || !include_payload {
            for i in &self.inputs {
                let _ = writeln!(out, "input {} sha256:{}", i.path.display(), i.sha256);
            }
            let _ = writeln!(out, "verdict: {}", self.verdict.label());
        }
        if let Some(d) = self.elapsed {
            let _ = writeln!(out, "time: {:.3}s", d.as_secs_f64());
        }
        out
    }
}
