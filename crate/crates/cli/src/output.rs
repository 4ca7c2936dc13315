use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

/// Version of the JSON documents emitted by every subcommand.
pub const SCHEMA_VERSION: &str = "1.0.0";

/// Standard output or a file.
pub enum Sink {
    Stdout(io::Stdout),
    File(BufWriter<File>),
}

impl Sink {
    pub fn open(path: Option<&Path>) -> io::Result<Self> {
        match path {
            Some(p) => Ok(Sink::File(BufWriter::new(File::create(p)?))),
            None => Ok(Sink::Stdout(io::stdout())),
        }
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::Stdout(s) => s.write(buf),
            Sink::File(f) => f.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::Stdout(s) => s.flush(),
            Sink::File(f) => f.flush(),
        }
    }
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn write_json<T: Serialize>(out: &mut impl Write, body: &T) -> io::Result<()> {
    let doc = Versioned {
        schema_version: SCHEMA_VERSION,
        body,
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}
