use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

const UNKNOWN: &str = "unknown";

/// Host facts shown in the report's environment block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvironmentInfo {
    pub os_name: String,
    pub user_name: String,
    pub host_name: String,
    pub runtime_version: String,
    pub framework_version: String,
}

impl EnvironmentInfo {
    /// Replaces empty fields with `"unknown"`.
    pub fn normalized(mut self) -> Self {
        for field in [
            &mut self.os_name,
            &mut self.user_name,
            &mut self.host_name,
            &mut self.runtime_version,
            &mut self.framework_version,
        ] {
            if field.trim().is_empty() {
                *field = UNKNOWN.to_string();
            }
        }
        self
    }

    pub fn unknown() -> Self {
        Self {
            os_name: UNKNOWN.into(),
            user_name: UNKNOWN.into(),
            host_name: UNKNOWN.into(),
            runtime_version: UNKNOWN.into(),
            framework_version: UNKNOWN.into(),
        }
    }
}

impl Default for EnvironmentInfo {
    fn default() -> Self {
        Self::unknown()
    }
}

fn os_name() -> Option<String> {
    let pretty = std::fs::read_to_string("/etc/os-release").ok().and_then(|text| {
        text.lines()
            .find_map(|l| l.strip_prefix("PRETTY_NAME="))
            .map(|v| v.trim_matches('"').to_string())
    });
    Some(match pretty {
        Some(p) => format!("{} ({} {})", p, std::env::consts::OS, std::env::consts::ARCH),
        None => format!("{} {}", std::env::consts::OS, std::env::consts::ARCH),
    })
}

fn user_name() -> Option<String> {
    ["USER", "USERNAME", "LOGNAME"]
        .iter()
        .find_map(|k| std::env::var(k).ok().filter(|v| !v.is_empty()))
}

fn host_name() -> Option<String> {
    std::fs::read_to_string("/proc/sys/kernel/hostname")
        .or_else(|_| std::fs::read_to_string("/etc/hostname"))
        .ok()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .or_else(|| {
            ["HOSTNAME", "COMPUTERNAME"]
                .iter()
                .find_map(|k| std::env::var(k).ok().filter(|v| !v.is_empty()))
        })
}

/// Probes the host once per process; later calls return the cached value.
pub fn collect_environment() -> EnvironmentInfo {
    static CACHE: OnceLock<EnvironmentInfo> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            EnvironmentInfo {
                os_name: os_name().unwrap_or_default(),
                user_name: user_name().unwrap_or_default(),
                host_name: host_name().unwrap_or_default(),
                runtime_version: env!("TAF_RUSTC_VERSION").to_string(),
                framework_version: format!("hybrid-taf {}", env!("CARGO_PKG_VERSION")),
            }
            .normalized()
        })
        .clone()
}
