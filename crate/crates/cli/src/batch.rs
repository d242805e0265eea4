use rayon::prelude::*;
use serde_json::{json, Value as Json};

use crate::eval::{CommandError, Session};
use crate::value::Value;

/// JSON object describing a command error.
pub fn error_json(e: &CommandError) -> Json {
    match e {
        CommandError::Parse(p) => json!({ "kind": "ParseError", "message": p.to_string(), "position": p.pos }),
        CommandError::Eval(ev) => json!({
            "kind": ev.kind,
            "message": ev.message,
            "subexpression": ev.subexpression,
        }),
    }
}

/// One command against a private copy of `base`.
pub fn run_command(base: &Session, command: &str) -> Result<Option<Value>, CommandError> {
    base.clone().run_line(command)
}

/// Runs independent commands in parallel. Returns the result array in input
/// order and whether every command succeeded.
pub fn run_batch(base: &Session, commands: &[String]) -> (Json, bool) {
    let rows: Vec<(Json, bool)> = commands
        .par_iter()
        .map(|c| match run_command(base, c) {
            Ok(v) => {
                let result = v.map_or(Json::Null, |v| v.to_json());
                (json!({ "command": c, "ok": true, "result": result }), true)
            }
            Err(e) => (json!({ "command": c, "ok": false, "error": error_json(&e) }), false),
        })
        .collect();
    let ok = rows.iter().all(|(_, ok)| *ok);
    (Json::Array(rows.into_iter().map(|(j, _)| j).collect()), ok)
}
