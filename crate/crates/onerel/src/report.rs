//! Query reports, printed as text or as JSON.

use std::time::Duration;

use serde::Serialize;

use onerel_core::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answer {
    Yes,
    No,
    Unsupported,
    ResourceExceeded,
}

impl Answer {
    pub fn exit_code(self) -> i32 {
        match self {
            Answer::Yes => 0,
            Answer::No => 1,
            Answer::Unsupported => 2,
            Answer::ResourceExceeded => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unsupported => "unsupported",
            Answer::ResourceExceeded => "resource-exceeded",
        }
    }

    pub fn parse(s: &str) -> Option<Answer> {
        Some(match s {
            "yes" => Answer::Yes,
            "no" => Answer::No,
            "unsupported" => Answer::Unsupported,
            "resource-exceeded" => Answer::ResourceExceeded,
            _ => return None,
        })
    }

    /// Errors that stop a decision before an answer. Anything else is a bug or bad input.
    pub fn from_error(e: &Error) -> Option<Answer> {
        match e {
            Error::Unsupported(_) | Error::CapabilityMissing(_) | Error::Precondition(_) => {
                Some(Answer::Unsupported)
            }
            Error::ResourceExceeded { .. } => Some(Answer::ResourceExceeded),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Generator indices (prefix lengths for P_w), in product order.
    pub factors: Vec<usize>,
    /// The product written out, e.g. `(abcd)(acd)`.
    pub expression: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct QueryReport {
    pub query: String,
    pub answer: Answer,
    pub class: Option<String>,
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub unchecked_hypotheses: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Wall time; left out of JSON so that output is reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl QueryReport {
    pub fn new(query: impl Into<String>, answer: Answer) -> Self {
        QueryReport {
            query: query.into(),
            answer,
            class: None,
            method: None,
            witness: None,
            unchecked_hypotheses: Vec::new(),
            reason: None,
            elapsed: Duration::ZERO,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from(self.answer.as_str());
        out.push('\n');
        if let Some(c) = &self.class {
            out.push_str(&format!("class: {c}\n"));
        }
        if let Some(m) = &self.method {
            out.push_str(&format!("method: {m}\n"));
        }
        if let Some(w) = &self.witness {
            out.push_str(&format!("witness: {}\n", w.expression));
        }
        for h in &self.unchecked_hypotheses {
            out.push_str(&format!("unchecked: {h}\n"));
        }
        if let Some(r) = &self.reason {
            out.push_str(&format!("reason: {r}\n"));
        }
        out.push_str(&format!("time: {:.3} ms\n", self.elapsed.as_secs_f64() * 1e3));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_is_omitted_when_absent() {
        let r = QueryReport::new("b", Answer::No);
        let j = r.to_json();
        assert!(!j.contains("witness"));
        assert!(j.contains("\"unchecked-hypotheses\": []"));
        assert!(j.contains("\"answer\": \"no\""));
    }

    #[test]
    fn resource_errors_stay_distinct_from_no() {
        let e = Error::ResourceExceeded {
            what: "automaton states",
            limit: 1,
        };
        assert_eq!(Answer::from_error(&e), Some(Answer::ResourceExceeded));
        assert_eq!(Answer::from_error(&Error::Unsupported("x".into())), Some(Answer::Unsupported));
        assert_eq!(Answer::from_error(&Error::NotInSubgroup), None);
    }
}
