//! Running an external termination prover on an exported problem.
//!
//! The command is a shell-like template in which `{}` stands for the path
//! of a temporary file holding the problem. The first whitespace-separated
//! token of the first output line decides the answer.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

const POLL_INTERVAL: Duration = Duration::from_millis(10);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", content = "detail", rename_all = "snake_case")]
pub enum ProverAnswer {
    Yes,
    No,
    Maybe,
    Error(String),
}

impl ProverAnswer {
    pub fn is_yes(&self) -> bool {
        *self == ProverAnswer::Yes
    }
}

/// Outcome of one prover invocation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProverRun {
    pub command: Vec<String>,
    pub answer: ProverAnswer,
    pub stdout: String,
    pub elapsed_ms: u128,
}

/// A prover command template plus its hard timeout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProverConfig {
    pub template: String,
    pub timeout: Duration,
}

impl ProverConfig {
    pub fn new(template: impl Into<String>, timeout: Duration) -> ProverConfig {
        ProverConfig {
            template: template.into(),
            timeout,
        }
    }

    pub fn run(&self, problem: &str) -> ProverRun {
        invoke_external_prover(&self.template, problem, self.timeout)
    }
}

/// Writes `problem` to a temporary file and runs the prover on it. Never
/// panics; every failure becomes [`ProverAnswer::Error`].
pub fn invoke_external_prover(template: &str, problem: &str, timeout: Duration) -> ProverRun {
    let started = Instant::now();
    let mut run = ProverRun {
        command: Vec::new(),
        answer: ProverAnswer::Error(String::new()),
        stdout: String::new(),
        elapsed_ms: 0,
    };
    run.answer = match run_inner(template, problem, timeout, &mut run) {
        Ok(answer) => answer,
        Err(detail) => ProverAnswer::Error(detail),
    };
    run.elapsed_ms = started.elapsed().as_millis();
    run
}

fn run_inner(
    template: &str,
    problem: &str,
    timeout: Duration,
    run: &mut ProverRun,
) -> Result<ProverAnswer, String> {
    let words =
        shlex::split(template).ok_or_else(|| format!("cannot split command {template:?}"))?;
    if !words.iter().any(|w| w.contains("{}")) {
        return Err("command template has no {} placeholder".into());
    }
    let mut file = tempfile::Builder::new()
        .prefix("streamprod-")
        .suffix(".trs")
        .tempfile()
        .map_err(|e| format!("cannot create problem file: {e}"))?;
    file.write_all(problem.as_bytes())
        .and_then(|()| file.flush())
        .map_err(|e| format!("cannot write problem file: {e}"))?;
    let path = file.path().to_string_lossy().into_owned();
    run.command = words.iter().map(|w| w.replace("{}", &path)).collect();

    let (program, args) = run.command.split_first().ok_or("empty command")?;
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| format!("cannot start {program}: {e}"))?;

    // A grandchild can keep the pipe open after a kill, so the reader is
    // never joined; its result arrives over a channel or not at all.
    let mut stdout = child.stdout.take().ok_or("no stdout pipe")?;
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        let _ = tx.send(buf);
    });

    let deadline = Instant::now() + timeout;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(format!("timed out after {} ms", timeout.as_millis()));
            }
            Ok(None) => thread::sleep(POLL_INTERVAL),
            Err(e) => return Err(format!("cannot wait for prover: {e}")),
        }
    };
    let remaining = deadline
        .saturating_duration_since(Instant::now())
        .max(POLL_INTERVAL);
    let output = rx
        .recv_timeout(remaining)
        .map_err(|_| "prover output was not closed".to_string())?;
    run.stdout = String::from_utf8_lossy(&output).into_owned();
    drop(file);

    let first = run.stdout.lines().next().unwrap_or("").trim();
    let token = first.split_whitespace().next().unwrap_or("");
    match token.to_ascii_uppercase().as_str() {
        "YES" => Ok(ProverAnswer::Yes),
        "NO" => Ok(ProverAnswer::No),
        "MAYBE" => Ok(ProverAnswer::Maybe),
        _ if !status.success() => Err(format!("prover exited with {status}")),
        _ => Err(format!("unrecognised answer {first:?}")),
    }
}
