use std::io::{IsTerminal, Write};

use vaspi::Diagnostic;

/// Diagnostic sink; colors codes only on a terminal and without `NO_COLOR`.
pub struct Stderr {
    color: bool,
}

impl Stderr {
    pub fn new() -> Self {
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        Stderr { color: !no_color && std::io::stderr().is_terminal() }
    }

    pub fn diagnostics<'a>(&mut self, diags: impl Iterator<Item = &'a Diagnostic>) {
        let mut out = std::io::stderr().lock();
        for d in diags {
            let code = if !self.color {
                d.code.clone()
            } else if d.is_error() {
                format!("\x1b[31m{}\x1b[0m", d.code)
            } else {
                format!("\x1b[33m{}\x1b[0m", d.code)
            };
            let subjects = if d.subjects.is_empty() { String::new() } else { format!(" [{}]", d.subjects.join(", ")) };
            let _ = writeln!(out, "{code}{subjects}: {}", d.message);
        }
    }

    pub fn note(&mut self, text: &str) {
        let _ = writeln!(std::io::stderr().lock(), "{text}");
    }
}
