use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ElementKind {
    Input,
    Button,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementSpec {
    pub kind: ElementKind,
    #[serde(default)]
    pub value: String,
}

impl ElementSpec {
    pub fn input() -> Self {
        Self {
            kind: ElementKind::Input,
            value: String::new(),
        }
    }

    pub fn button(label: &str) -> Self {
        Self {
            kind: ElementKind::Button,
            value: label.into(),
        }
    }

    pub fn text(value: &str) -> Self {
        Self {
            kind: ElementKind::Text,
            value: value.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSpec {
    pub elements: BTreeMap<String, ElementSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Credential {
    pub user: String,
    pub password: String,
}

/// Guard on a transition, evaluated against the current page's input values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Condition {
    Always,
    /// The `(user_field, password_field)` values form one of `accepted`.
    CredentialsIn {
        user_field: String,
        password_field: String,
        accepted: Vec<Credential>,
    },
}

impl Condition {
    pub fn holds(&self, values: &BTreeMap<String, String>) -> bool {
        match self {
            Condition::Always => true,
            Condition::CredentialsIn {
                user_field,
                password_field,
                accepted,
            } => {
                let user = values.get(user_field).map(String::as_str).unwrap_or("");
                let pass = values.get(password_field).map(String::as_str).unwrap_or("");
                accepted.iter().any(|c| c.user == user && c.password == pass)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub on_click: String,
    /// Restricts the transition to clicks on this page.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    pub when: Condition,
    pub goto: String,
}

/// A virtual site: flat element maps per page plus click transitions.
/// The first matching transition wins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortalSpec {
    pub pages: BTreeMap<String, PageSpec>,
    pub transitions: Vec<Transition>,
    pub initial_page: String,
    #[serde(default = "default_result_element")]
    pub result_element: String,
}

fn default_result_element() -> String {
    "result".into()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PortalSpecError {
    #[error("initial page {0:?} does not exist")]
    MissingInitialPage(String),
    #[error("transition target {0:?} does not exist")]
    DanglingTransition(String),
    #[error("transition source page {0:?} does not exist")]
    UnknownSourcePage(String),
    #[error("terminal page {0:?} lacks the result element {1:?}")]
    MissingResultElement(String, String),
    #[error("invalid portal JSON: {0}")]
    Json(String),
}

impl PortalSpec {
    pub fn from_json(text: &str) -> Result<Self, PortalSpecError> {
        let spec: Self =
            serde_json::from_str(text).map_err(|e| PortalSpecError::Json(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("portal spec serializes")
    }

    /// Pages no transition leaves from.
    pub fn terminal_pages(&self) -> impl Iterator<Item = &String> {
        self.pages.keys().filter(move |page| {
            !self.transitions.iter().any(|t| match &t.from {
                Some(from) => from == *page,
                None => self.pages[*page].elements.contains_key(&t.on_click),
            })
        })
    }

    pub fn validate(&self) -> Result<(), PortalSpecError> {
        if !self.pages.contains_key(&self.initial_page) {
            return Err(PortalSpecError::MissingInitialPage(self.initial_page.clone()));
        }
        for t in &self.transitions {
            if !self.pages.contains_key(&t.goto) {
                return Err(PortalSpecError::DanglingTransition(t.goto.clone()));
            }
            if let Some(from) = &t.from {
                if !self.pages.contains_key(from) {
                    return Err(PortalSpecError::UnknownSourcePage(from.clone()));
                }
            }
        }
        for page in self.terminal_pages() {
            if !self.pages[page].elements.contains_key(&self.result_element) {
                return Err(PortalSpecError::MissingResultElement(
                    page.clone(),
                    self.result_element.clone(),
                ));
            }
        }
        Ok(())
    }
}

/// Three-page login portal: `login` with `username`, `password` and
/// `submit`; `success` and `failure` each carrying a `result` banner of
/// `PASS` or `FAIL` above empty `username` and `password` inputs.
pub fn default_login_spec<U, P>(valid_credentials: impl IntoIterator<Item = (U, P)>) -> PortalSpec
where
    U: Into<String>,
    P: Into<String>,
{
    let accepted = valid_credentials
        .into_iter()
        .map(|(u, p)| Credential {
            user: u.into(),
            password: p.into(),
        })
        .collect();

    let mut login = PageSpec::default();
    login.elements.insert("username".into(), ElementSpec::input());
    login.elements.insert("password".into(), ElementSpec::input());
    login.elements.insert("submit".into(), ElementSpec::button("Login"));
    // Result pages redisplay the (emptied) form under the banner.
    let result_page = |banner: &str| {
        let mut page = PageSpec::default();
        page.elements.insert("username".into(), ElementSpec::input());
        page.elements.insert("password".into(), ElementSpec::input());
        page.elements.insert("result".into(), ElementSpec::text(banner));
        page
    };
    let success = result_page("PASS");
    let failure = result_page("FAIL");

    PortalSpec {
        pages: BTreeMap::from([
            ("login".into(), login),
            ("success".into(), success),
            ("failure".into(), failure),
        ]),
        transitions: vec![
            Transition {
                on_click: "submit".into(),
                from: Some("login".into()),
                when: Condition::CredentialsIn {
                    user_field: "username".into(),
                    password_field: "password".into(),
                    accepted,
                },
                goto: "success".into(),
            },
            Transition {
                on_click: "submit".into(),
                from: Some("login".into()),
                when: Condition::Always,
                goto: "failure".into(),
            },
        ],
        initial_page: "login".into(),
        result_element: default_result_element(),
    }
}
