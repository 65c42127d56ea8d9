//! Line-delimited JSON protocol for external candidates.
//!
//! Validator mode:
//!
//! ```text
//! -> {"problem": "sort", "input": <INPUT>, "output": <OUTPUT>}
//! <- {"valid": true}
//! ```
//!
//! Implementation mode:
//!
//! ```text
//! -> {"problem": "sort", "input": <INPUT>}
//! <- {"output": <OUTPUT>}
//! ```
//!
//! One response line per request line, in order. A whole batch is streamed
//! through a single process; the process should exit once stdin closes.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::{Instance, Problem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidatorRequest {
    pub problem: Problem,
    pub input: Value,
    pub output: Value,
}

impl ValidatorRequest {
    pub fn for_instance(instance: &Instance) -> Self {
        ValidatorRequest {
            problem: instance.problem(),
            input: instance.input_json(),
            output: instance.output_json(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        Instance::from_parts(self.problem, self.input.clone(), self.output.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidatorResponse {
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplementationRequest {
    pub problem: Problem,
    pub input: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplementationResponse {
    pub output: Value,
}

/// What came back for one request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reply {
    Line(String),
    /// The process ended or its output could not be read.
    Failed(String),
    TimedOut,
}

/// A parsed external command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalCommand {
    argv: Vec<String>,
}

impl ExternalCommand {
    /// Splits `command` with POSIX shell quoting rules. No shell is involved.
    pub fn parse(command: &str) -> Result<Self> {
        match shlex::split(command) {
            Some(argv) if !argv.is_empty() => Ok(ExternalCommand { argv }),
            _ => Err(Error::InvalidArgument(format!(
                "cannot parse command line `{command}`"
            ))),
        }
    }

    pub fn from_argv(argv: Vec<String>) -> Result<Self> {
        if argv.is_empty() {
            return Err(Error::InvalidArgument("empty command line".into()));
        }
        Ok(ExternalCommand { argv })
    }

    pub fn display(&self) -> String {
        shlex::try_join(self.argv.iter().map(String::as_str))
            .unwrap_or_else(|_| self.argv.join(" "))
    }

    fn spawn(&self) -> Result<Child> {
        Command::new(&self.argv[0])
            .args(&self.argv[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| Error::Launch {
                command: self.display(),
                reason: e.to_string(),
            })
    }

    /// Streams `requests` through the process and collects one reply each.
    ///
    /// Each reply has `timeout` to arrive after the previous one. On a
    /// timeout the process is killed and a fresh one picks up the remaining
    /// requests. If the process stops answering, every outstanding request
    /// gets `Reply::Failed`.
    pub fn run_batch(&self, requests: &[String], timeout: Duration) -> Result<Vec<Reply>> {
        let mut replies = Vec::with_capacity(requests.len());
        while replies.len() < requests.len() {
            let start = replies.len();
            let mut child = self.spawn()?;
            let mut stdin = child.stdin.take().expect("stdin is piped");
            let stdout = child.stdout.take().expect("stdout is piped");

            let pending: Vec<String> = requests[start..].to_vec();
            let writer = thread::spawn(move || {
                for line in pending {
                    if writeln!(stdin, "{line}")
                        .and_then(|_| stdin.flush())
                        .is_err()
                    {
                        break;
                    }
                }
            });
            let (tx, rx) = mpsc::channel();
            thread::spawn(move || {
                for line in BufReader::new(stdout).lines() {
                    let stop = line.is_err();
                    if tx.send(line).is_err() || stop {
                        break;
                    }
                }
            });

            let mut timed_out = false;
            while replies.len() < requests.len() {
                match rx.recv_timeout(timeout) {
                    Ok(Ok(line)) => replies.push(Reply::Line(line)),
                    Ok(Err(e)) => {
                        let reason = format!("unreadable output: {e}");
                        replies.resize(requests.len(), Reply::Failed(reason));
                    }
                    Err(RecvTimeoutError::Timeout) => {
                        replies.push(Reply::TimedOut);
                        timed_out = true;
                        break;
                    }
                    Err(RecvTimeoutError::Disconnected) => {
                        let reason = describe_exit(&mut child);
                        replies.resize(requests.len(), Reply::Failed(reason));
                    }
                }
            }
            let _ = child.kill();
            let _ = child.wait();
            if !timed_out {
                let _ = writer.join();
            }
        }
        Ok(replies)
    }
}

fn describe_exit(child: &mut Child) -> String {
    match child.wait() {
        Ok(status) => format!("process ended without answering ({status})"),
        Err(e) => format!("process ended without answering ({e})"),
    }
}

/// Serves the protocol over `reader`/`writer`, one response per request.
/// Handy for writing candidates in Rust.
pub fn serve<R, W, F>(reader: R, mut writer: W, mut handle: F) -> std::io::Result<()>
where
    R: BufRead,
    W: Write,
    F: FnMut(&str) -> String,
{
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writeln!(writer, "{}", handle(&line))?;
        writer.flush()?;
    }
    Ok(())
}
