//! A throwaway MySQL-protocol server holding in-memory tables.
//!
//! It speaks just enough of the client/server protocol for a read-only
//! client: the v10 handshake with `mysql_native_password`, `COM_QUERY` for
//! `SELECT * FROM <table>` and `SELECT @@<var>`, `COM_PING`, `COM_INIT_DB`
//! and `COM_QUIT`. Result sets use the text protocol with classic EOF
//! packets.

use std::collections::BTreeMap;
use std::io::{self, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use sha1::{Digest, Sha1};

const CLIENT_LONG_PASSWORD: u32 = 0x0000_0001;
const CLIENT_LONG_FLAG: u32 = 0x0000_0004;
const CLIENT_CONNECT_WITH_DB: u32 = 0x0000_0008;
const CLIENT_PROTOCOL_41: u32 = 0x0000_0200;
const CLIENT_TRANSACTIONS: u32 = 0x0000_2000;
const CLIENT_SECURE_CONNECTION: u32 = 0x0000_8000;
const CLIENT_MULTI_RESULTS: u32 = 0x0002_0000;
const CLIENT_PLUGIN_AUTH: u32 = 0x0008_0000;
const CLIENT_CONNECT_ATTRS: u32 = 0x0010_0000;
const CLIENT_PLUGIN_AUTH_LENENC: u32 = 0x0020_0000;

const SERVER_CAPS: u32 = CLIENT_LONG_PASSWORD
    | CLIENT_LONG_FLAG
    | CLIENT_CONNECT_WITH_DB
    | CLIENT_PROTOCOL_41
    | CLIENT_TRANSACTIONS
    | CLIENT_SECURE_CONNECTION
    | CLIENT_MULTI_RESULTS
    | CLIENT_PLUGIN_AUTH
    | CLIENT_CONNECT_ATTRS
    | CLIENT_PLUGIN_AUTH_LENENC;

const STATUS_AUTOCOMMIT: u16 = 0x0002;
const UTF8MB4_GENERAL_CI: u8 = 45;
const MYSQL_TYPE_VAR_STRING: u8 = 0xfd;
const NATIVE_PASSWORD: &str = "mysql_native_password";

const COM_QUIT: u8 = 0x01;
const COM_INIT_DB: u8 = 0x02;
const COM_QUERY: u8 = 0x03;
const COM_PING: u8 = 0x0e;

/// One in-memory table: ordered column names and rows of nullable text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StubTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<String>>>,
}

impl StubTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.rows
            .push(cells.into_iter().map(|c| Some(c.into())).collect());
    }
}

#[derive(Debug, Clone)]
pub struct MySqlStubConfig {
    pub database: String,
    pub user: String,
    pub password: String,
    pub tables: BTreeMap<String, StubTable>,
}

impl MySqlStubConfig {
    pub fn new(database: &str, user: &str, password: &str) -> Self {
        Self {
            database: database.into(),
            user: user.into(),
            password: password.into(),
            tables: BTreeMap::new(),
        }
    }

    pub fn with_table(mut self, name: &str, table: StubTable) -> Self {
        self.tables.insert(name.into(), table);
        self
    }
}

struct Shared {
    config: MySqlStubConfig,
    stopped: AtomicBool,
    next_conn_id: AtomicU32,
    queries: Mutex<Vec<String>>,
    connections: Mutex<Vec<TcpStream>>,
}

/// Running stub server. Dropping it stops the server.
pub struct MySqlStub {
    addr: SocketAddr,
    shared: Arc<Shared>,
    acceptor: Option<JoinHandle<()>>,
}

impl MySqlStub {
    /// Binds `bind` (use port 0 for an ephemeral port) and starts serving.
    pub fn start(config: MySqlStubConfig, bind: &str) -> io::Result<Self> {
        let listener = TcpListener::bind(bind)?;
        let addr = listener.local_addr()?;
        let shared = Arc::new(Shared {
            config,
            stopped: AtomicBool::new(false),
            next_conn_id: AtomicU32::new(1),
            queries: Mutex::new(Vec::new()),
            connections: Mutex::new(Vec::new()),
        });
        let acceptor = {
            let shared = Arc::clone(&shared);
            std::thread::spawn(move || accept_loop(listener, shared))
        };
        Ok(Self {
            addr,
            shared,
            acceptor: Some(acceptor),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// `host:port` form suitable for `MYSQL_URL`.
    pub fn endpoint(&self) -> String {
        self.addr.to_string()
    }

    /// Every `COM_QUERY` text received, in arrival order.
    pub fn queries(&self) -> Vec<String> {
        self.shared.queries.lock().unwrap().clone()
    }

    pub fn stop(&mut self) {
        if self.shared.stopped.swap(true, Ordering::SeqCst) {
            return;
        }
        // wake the acceptor
        let _ = TcpStream::connect_timeout(&self.addr, Duration::from_millis(200));
        for conn in self.shared.connections.lock().unwrap().drain(..) {
            let _ = conn.shutdown(Shutdown::Both);
        }
        if let Some(handle) = self.acceptor.take() {
            let _ = handle.join();
        }
    }
}

impl Drop for MySqlStub {
    fn drop(&mut self) {
        self.stop();
    }
}

fn accept_loop(listener: TcpListener, shared: Arc<Shared>) {
    for stream in listener.incoming() {
        if shared.stopped.load(Ordering::SeqCst) {
            break;
        }
        let Ok(stream) = stream else { continue };
        if let Ok(clone) = stream.try_clone() {
            shared.connections.lock().unwrap().push(clone);
        }
        let shared = Arc::clone(&shared);
        std::thread::spawn(move || {
            let _ = Session::new(stream, shared).run();
        });
    }
}

fn put_lenenc_int(buf: &mut Vec<u8>, n: u64) {
    match n {
        0..=250 => buf.push(n as u8),
        251..=0xffff => {
            buf.push(0xfc);
            buf.extend_from_slice(&(n as u16).to_le_bytes());
        }
        0x1_0000..=0xff_ffff => {
            buf.push(0xfd);
            buf.extend_from_slice(&(n as u32).to_le_bytes()[..3]);
        }
        _ => {
            buf.push(0xfe);
            buf.extend_from_slice(&n.to_le_bytes());
        }
    }
}

fn put_lenenc_str(buf: &mut Vec<u8>, s: &[u8]) {
    put_lenenc_int(buf, s.len() as u64);
    buf.extend_from_slice(s);
}

/// Cursor over a received payload.
struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        if self.buf.len() < n {
            return None;
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Some(head)
    }

    fn u8(&mut self) -> Option<u8> {
        self.take(1).map(|b| b[0])
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4).map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn nul_str(&mut self) -> Option<&'a [u8]> {
        let end = self.buf.iter().position(|b| *b == 0)?;
        let s = self.take(end)?;
        self.take(1)?;
        Some(s)
    }

    fn lenenc_int(&mut self) -> Option<u64> {
        match self.u8()? {
            n @ 0..=250 => Some(n as u64),
            0xfc => self.take(2).map(|b| u16::from_le_bytes([b[0], b[1]]) as u64),
            0xfd => self
                .take(3)
                .map(|b| u32::from_le_bytes([b[0], b[1], b[2], 0]) as u64),
            0xfe => self.take(8).map(|b| {
                let mut a = [0u8; 8];
                a.copy_from_slice(b);
                u64::from_le_bytes(a)
            }),
            _ => None,
        }
    }
}

/// `SHA1(pw) XOR SHA1(scramble ++ SHA1(SHA1(pw)))`
fn native_password_token(password: &str, scramble: &[u8]) -> Vec<u8> {
    if password.is_empty() {
        return Vec::new();
    }
    let stage1 = Sha1::digest(password.as_bytes());
    let stage2 = Sha1::digest(stage1);
    let mut h = Sha1::new();
    h.update(scramble);
    h.update(stage2);
    let mix = h.finalize();
    stage1.iter().zip(mix.iter()).map(|(a, b)| a ^ b).collect()
}

struct Session {
    stream: TcpStream,
    shared: Arc<Shared>,
    conn_id: u32,
    seq: u8,
    scramble: [u8; 20],
    database: Option<String>,
}

enum Query {
    SelectAll(String),
    SystemVar(String),
    Other,
}

fn parse_query(sql: &str) -> Query {
    let sql = sql.trim().trim_end_matches(';').trim();
    let words: Vec<&str> = sql.split_whitespace().collect();
    let unquote = |s: &str| s.trim_matches('`').to_string();
    match words.as_slice() {
        [select, star, from, table]
            if select.eq_ignore_ascii_case("select")
                && *star == "*"
                && from.eq_ignore_ascii_case("from") =>
        {
            // strip an optional `db`. qualifier
            let name = match table.rsplit_once('.') {
                Some((_, t)) => t,
                None => table,
            };
            Query::SelectAll(unquote(name))
        }
        [select, var] if select.eq_ignore_ascii_case("select") && var.starts_with("@@") => {
            Query::SystemVar(var.trim_start_matches("@@").to_ascii_lowercase())
        }
        _ => Query::Other,
    }
}

impl Session {
    fn new(stream: TcpStream, shared: Arc<Shared>) -> Self {
        let id = shared.next_conn_id.fetch_add(1, Ordering::SeqCst);
        // printable, NUL-free scramble derived from the connection id
        let mut scramble = [0u8; 20];
        for (i, b) in scramble.iter_mut().enumerate() {
            *b = b'A' + ((id as usize * 7 + i * 13) % 26) as u8;
        }
        Self {
            stream,
            shared,
            conn_id: id,
            seq: 0,
            scramble,
            database: None,
        }
    }

    fn write_packet(&mut self, payload: &[u8]) -> io::Result<()> {
        let mut frame = Vec::with_capacity(payload.len() + 4);
        frame.extend_from_slice(&(payload.len() as u32).to_le_bytes()[..3]);
        frame.push(self.seq);
        frame.extend_from_slice(payload);
        self.seq = self.seq.wrapping_add(1);
        self.stream.write_all(&frame)
    }

    fn read_packet(&mut self) -> io::Result<Vec<u8>> {
        let mut header = [0u8; 4];
        self.stream.read_exact(&mut header)?;
        let len = u32::from_le_bytes([header[0], header[1], header[2], 0]) as usize;
        self.seq = header[3].wrapping_add(1);
        let mut payload = vec![0u8; len];
        self.stream.read_exact(&mut payload)?;
        Ok(payload)
    }

    fn ok(&mut self) -> io::Result<()> {
        let mut p = vec![0x00, 0x00, 0x00];
        p.extend_from_slice(&STATUS_AUTOCOMMIT.to_le_bytes());
        p.extend_from_slice(&0u16.to_le_bytes());
        self.write_packet(&p)
    }

    fn err(&mut self, code: u16, state: &str, message: &str) -> io::Result<()> {
        let mut p = vec![0xff];
        p.extend_from_slice(&code.to_le_bytes());
        p.push(b'#');
        p.extend_from_slice(state.as_bytes());
        p.extend_from_slice(message.as_bytes());
        self.write_packet(&p)
    }

    fn eof(&mut self) -> io::Result<()> {
        let mut p = vec![0xfe];
        p.extend_from_slice(&0u16.to_le_bytes());
        p.extend_from_slice(&STATUS_AUTOCOMMIT.to_le_bytes());
        self.write_packet(&p)
    }

    fn handshake(&mut self) -> io::Result<()> {
        let mut p = vec![10u8];
        p.extend_from_slice(b"8.0.36-taf-stub\0");
        p.extend_from_slice(&self.conn_id.to_le_bytes());
        p.extend_from_slice(&self.scramble[..8]);
        p.push(0);
        p.extend_from_slice(&(SERVER_CAPS as u16).to_le_bytes());
        p.push(UTF8MB4_GENERAL_CI);
        p.extend_from_slice(&STATUS_AUTOCOMMIT.to_le_bytes());
        p.extend_from_slice(&((SERVER_CAPS >> 16) as u16).to_le_bytes());
        p.push(21);
        p.extend_from_slice(&[0u8; 10]);
        p.extend_from_slice(&self.scramble[8..]);
        p.push(0);
        p.extend_from_slice(NATIVE_PASSWORD.as_bytes());
        p.push(0);
        self.write_packet(&p)
    }

    /// Reads the handshake response; `Ok(false)` means access was denied.
    fn authenticate(&mut self) -> io::Result<bool> {
        let payload = self.read_packet()?;
        let bad = || io::Error::new(io::ErrorKind::InvalidData, "malformed handshake response");
        let mut r = Reader { buf: &payload };
        let caps = r.u32().ok_or_else(bad)?;
        r.take(4 + 1 + 23).ok_or_else(bad)?;
        let user = String::from_utf8_lossy(r.nul_str().ok_or_else(bad)?).into_owned();
        let token = if caps & CLIENT_PLUGIN_AUTH_LENENC != 0 {
            let n = r.lenenc_int().ok_or_else(bad)? as usize;
            r.take(n).ok_or_else(bad)?.to_vec()
        } else if caps & CLIENT_SECURE_CONNECTION != 0 {
            let n = r.u8().ok_or_else(bad)? as usize;
            r.take(n).ok_or_else(bad)?.to_vec()
        } else {
            r.nul_str().ok_or_else(bad)?.to_vec()
        };
        let database = if caps & CLIENT_CONNECT_WITH_DB != 0 {
            r.nul_str()
                .map(|s| String::from_utf8_lossy(s).into_owned())
                .filter(|s| !s.is_empty())
        } else {
            None
        };
        let plugin = if caps & CLIENT_PLUGIN_AUTH != 0 {
            r.nul_str().map(|s| String::from_utf8_lossy(s).into_owned())
        } else {
            None
        };

        let expected = native_password_token(&self.shared.config.password, &self.scramble);
        let plugin_ok = plugin.as_deref().is_none_or(|p| p == NATIVE_PASSWORD);
        if user != self.shared.config.user || token != expected || !plugin_ok {
            let msg = format!("Access denied for user '{user}'@'localhost' (using password: {})",
                if token.is_empty() { "NO" } else { "YES" });
            self.err(1045, "28000", &msg)?;
            return Ok(false);
        }
        if let Some(db) = database {
            if db != self.shared.config.database {
                self.err(1049, "42000", &format!("Unknown database '{db}'"))?;
                return Ok(false);
            }
            self.database = Some(db);
        }
        self.ok()?;
        Ok(true)
    }

    fn run(mut self) -> io::Result<()> {
        self.handshake()?;
        if !self.authenticate()? {
            return Ok(());
        }
        loop {
            if self.shared.stopped.load(Ordering::SeqCst) {
                return Ok(());
            }
            let payload = match self.read_packet() {
                Ok(p) => p,
                Err(_) => return Ok(()),
            };
            let Some((&command, body)) = payload.split_first() else {
                continue;
            };
            match command {
                COM_QUIT => return Ok(()),
                COM_PING => self.ok()?,
                COM_INIT_DB => {
                    let db = String::from_utf8_lossy(body).into_owned();
                    if db == self.shared.config.database {
                        self.database = Some(db);
                        self.ok()?;
                    } else {
                        self.err(1049, "42000", &format!("Unknown database '{db}'"))?;
                    }
                }
                COM_QUERY => {
                    let sql = String::from_utf8_lossy(body).into_owned();
                    self.shared.queries.lock().unwrap().push(sql.clone());
                    self.query(&sql)?;
                }
                other => self.err(1047, "08S01", &format!("Unknown command {other:#04x}"))?,
            }
        }
    }

    fn query(&mut self, sql: &str) -> io::Result<()> {
        match parse_query(sql) {
            Query::SelectAll(table) => {
                let Some(db) = self.database.clone() else {
                    return self.err(1046, "3D000", "No database selected");
                };
                match self.shared.config.tables.get(&table).cloned() {
                    Some(t) => self.result_set(&db, &table, &t.columns, &t.rows),
                    None => self.err(
                        1146,
                        "42S02",
                        &format!("Table '{db}.{table}' doesn't exist"),
                    ),
                }
            }
            Query::SystemVar(var) => {
                let value = match var.as_str() {
                    "max_allowed_packet" => Some("16777216".to_string()),
                    "wait_timeout" => Some("28800".to_string()),
                    _ => None,
                };
                self.result_set("", "", &[format!("@@{var}")], &[vec![value]])
            }
            Query::Other => self.err(
                1064,
                "42000",
                "read-only stub accepts only SELECT * FROM <table>",
            ),
        }
    }

    fn result_set(
        &mut self,
        schema: &str,
        table: &str,
        columns: &[String],
        rows: &[Vec<Option<String>>],
    ) -> io::Result<()> {
        let mut count = Vec::new();
        put_lenenc_int(&mut count, columns.len() as u64);
        self.write_packet(&count)?;
        for name in columns {
            let mut p = Vec::new();
            put_lenenc_str(&mut p, b"def");
            put_lenenc_str(&mut p, schema.as_bytes());
            put_lenenc_str(&mut p, table.as_bytes());
            put_lenenc_str(&mut p, table.as_bytes());
            put_lenenc_str(&mut p, name.as_bytes());
            put_lenenc_str(&mut p, name.as_bytes());
            p.push(0x0c);
            p.extend_from_slice(&(UTF8MB4_GENERAL_CI as u16).to_le_bytes());
            p.extend_from_slice(&1024u32.to_le_bytes());
            p.push(MYSQL_TYPE_VAR_STRING);
            p.extend_from_slice(&0u16.to_le_bytes());
            p.push(0);
            p.extend_from_slice(&[0, 0]);
            self.write_packet(&p)?;
        }
        self.eof()?;
        for row in rows {
            let mut p = Vec::new();
            for cell in row {
                match cell {
                    Some(s) => put_lenenc_str(&mut p, s.as_bytes()),
                    None => p.push(0xfb),
                }
            }
            self.write_packet(&p)?;
        }
        self.eof()
    }
}
