use std::fmt;
use std::sync::Arc;

use super::time::VirtualTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    Output,
    StateChange,
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordKind::Output => "output",
            RecordKind::StateChange => "state",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceValue {
    Scalar(f64),
    Text(String),
}

impl TraceValue {
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            TraceValue::Scalar(v) => Some(*v),
            TraceValue::Text(_) => None,
        }
    }
}

impl From<f64> for TraceValue {
    fn from(v: f64) -> Self {
        TraceValue::Scalar(v)
    }
}

impl From<usize> for TraceValue {
    fn from(v: usize) -> Self {
        TraceValue::Scalar(v as f64)
    }
}

impl From<u64> for TraceValue {
    fn from(v: u64) -> Self {
        TraceValue::Scalar(v as f64)
    }
}

impl From<String> for TraceValue {
    fn from(v: String) -> Self {
        TraceValue::Text(v)
    }
}

impl From<&str> for TraceValue {
    fn from(v: &str) -> Self {
        TraceValue::Text(v.to_owned())
    }
}

impl fmt::Display for TraceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceValue::Scalar(v) => write!(f, "{v}"),
            TraceValue::Text(s) => f.write_str(s),
        }
    }
}

/// One observation emitted during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTraceRecord {
    pub time: VirtualTime,
    pub component: Arc<str>,
    pub kind: RecordKind,
    pub variable: String,
    pub value: TraceValue,
}

/// Records in non-decreasing time order; records sharing a time are ordered
/// by component path, then by emission order within the component.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventTrace {
    records: Vec<EventTraceRecord>,
}

impl EventTrace {
    pub fn records(&self) -> &[EventTraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn for_component<'a>(
        &'a self,
        path: &'a str,
    ) -> impl Iterator<Item = &'a EventTraceRecord> + 'a {
        self.records.iter().filter(move |r| &*r.component == path)
    }

    /// Line-oriented text form used for byte-level replay comparison.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.time, r.component, r.kind, r.variable, r.value
            ));
        }
        out
    }

    pub fn into_records(self) -> Vec<EventTraceRecord> {
        self.records
    }
}

/// Collects records for the instant being simulated and releases them in
/// canonical order once the clock moves on.
#[derive(Debug, Default)]
pub(crate) struct TraceBuffer {
    done: Vec<EventTraceRecord>,
    pending: Vec<EventTraceRecord>,
}

impl TraceBuffer {
    pub(crate) fn push(&mut self, record: EventTraceRecord) {
        if let Some(last) = self.pending.last() {
            if last.time != record.time {
                self.flush();
            }
        }
        self.pending.push(record);
    }

    fn flush(&mut self) {
        // Stable: per-component emission order survives.
        self.pending.sort_by(|a, b| a.component.cmp(&b.component));
        self.done.append(&mut self.pending);
    }

    pub(crate) fn finish(mut self) -> EventTrace {
        self.flush();
        EventTrace { records: self.done }
    }
}
