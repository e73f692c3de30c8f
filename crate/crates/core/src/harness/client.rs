//! Model clients: the [`ModelClient`] interface, offline mocks, and
//! vendor-neutral HTTP clients for chat-completions and embeddings endpoints.

use std::collections::HashMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Shape the structured `answer` field must take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerSchema {
    Text,
    Integer,
    IntegerList,
}

impl AnswerSchema {
    /// JSON schema of the `{reasoning, answer}` reply object.
    pub fn json_schema(self) -> Value {
        let answer = match self {
            AnswerSchema::Text => json!({"type": "string"}),
            AnswerSchema::Integer => json!({"type": "integer"}),
            AnswerSchema::IntegerList => json!({"type": "array", "items": {"type": "integer"}}),
        };
        json!({
            "type": "object",
            "properties": {"reasoning": {"type": "string"}, "answer": answer},
            "required": ["reasoning", "answer"],
            "additionalProperties": false
        })
    }
}

/// One dialogue request. `instance_id`, `task` and `seed` identify the
/// request for caching and mocks; only `system`, `user`, `seed`,
/// `max_tokens` and `schema` are sent to a remote model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub instance_id: String,
    pub task: String,
    pub seed: u64,
    pub system: String,
    pub user: String,
    pub max_tokens: u32,
    pub schema: AnswerSchema,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatReply {
    pub reasoning: String,
    pub answer: Value,
    /// Unparsed reply body as received.
    pub raw: String,
}

impl ChatReply {
    pub fn answer(answer: Value) -> Self {
        ChatReply {
            reasoning: String::new(),
            raw: json!({"reasoning": "", "answer": answer}).to_string(),
            answer,
        }
    }

    /// Reads a `{reasoning, answer}` object; anything else becomes a bare
    /// string answer holding the whole text.
    pub fn from_content(content: &str) -> Self {
        #[derive(Deserialize)]
        struct Structured {
            #[serde(default)]
            reasoning: String,
            answer: Value,
        }
        match serde_json::from_str::<Structured>(content) {
            Ok(s) => ChatReply {
                reasoning: s.reasoning,
                answer: s.answer,
                raw: content.to_string(),
            },
            Err(_) => ChatReply {
                reasoning: String::new(),
                answer: Value::String(content.to_string()),
                raw: content.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedRequest {
    pub instance_id: String,
    pub text: String,
    /// Prepended to `text` by clients that take instructions inline.
    pub instruction: Option<String>,
}

impl EmbedRequest {
    pub fn input(&self) -> String {
        match &self.instruction {
            Some(i) => format!("{i}{}", self.text),
            None => self.text.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClientError {
    #[error("transport error: {message}")]
    Transport { message: String, retryable: bool },
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed reply: {0}")]
    BadReply(String),
    #[error("client does not support {0}")]
    Unsupported(&'static str),
    #[error("no scripted reply for {0}")]
    NoReply(String),
}

impl ClientError {
    pub fn is_retryable(&self) -> bool {
        match self {
            ClientError::Transport { retryable, .. } => *retryable,
            ClientError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

/// A dialogue and/or embedding model.
pub trait ModelClient: Send + Sync {
    fn name(&self) -> String;

    fn chat(&self, _req: &ChatRequest) -> Result<ChatReply, ClientError> {
        Err(ClientError::Unsupported("chat"))
    }

    /// Must be deterministic for a fixed request.
    fn embed(&self, _req: &EmbedRequest) -> Result<Vec<f64>, ClientError> {
        Err(ClientError::Unsupported("embeddings"))
    }
}

type ChatFn = dyn Fn(&ChatRequest) -> Result<ChatReply, ClientError> + Send + Sync;
type EmbedFn = dyn Fn(&EmbedRequest) -> Result<Vec<f64>, ClientError> + Send + Sync;

/// A client whose replies come from closures.
pub struct ScriptedClient {
    name: String,
    chat: Option<Box<ChatFn>>,
    embed: Option<Box<EmbedFn>>,
}

impl ScriptedClient {
    pub fn new(name: impl Into<String>) -> Self {
        ScriptedClient {
            name: name.into(),
            chat: None,
            embed: None,
        }
    }

    pub fn on_chat(mut self, f: impl Fn(&ChatRequest) -> Result<ChatReply, ClientError> + Send + Sync + 'static) -> Self {
        self.chat = Some(Box::new(f));
        self
    }

    pub fn on_embed(mut self, f: impl Fn(&EmbedRequest) -> Result<Vec<f64>, ClientError> + Send + Sync + 'static) -> Self {
        self.embed = Some(Box::new(f));
        self
    }
}

impl ModelClient for ScriptedClient {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn chat(&self, req: &ChatRequest) -> Result<ChatReply, ClientError> {
        match &self.chat {
            Some(f) => f(req),
            None => Err(ClientError::Unsupported("chat")),
        }
    }

    fn embed(&self, req: &EmbedRequest) -> Result<Vec<f64>, ClientError> {
        match &self.embed {
            Some(f) => f(req),
            None => Err(ClientError::Unsupported("embeddings")),
        }
    }
}

/// Always picks position `position`; rankings are the identity order.
#[derive(Debug, Clone, Copy)]
pub struct FixedAnswerClient {
    pub position: i64,
}

impl ModelClient for FixedAnswerClient {
    fn name(&self) -> String {
        format!("fixed-{}", self.position)
    }

    fn chat(&self, req: &ChatRequest) -> Result<ChatReply, ClientError> {
        // the first user line is the reference, each further line a candidate
        let n = req.user.lines().count().saturating_sub(1) as i64;
        Ok(ChatReply::answer(match req.schema {
            AnswerSchema::Integer => json!(self.position),
            AnswerSchema::IntegerList => json!((1..=n).collect::<Vec<_>>()),
            AnswerSchema::Text => json!(""),
        }))
    }
}

/// Replies looked up by `(instance_id, task, seed)`; embeddings by
/// `(instance_id, text)`. Built by the harness from ground truth, or by hand.
#[derive(Debug, Clone, Default)]
pub struct OracleClient {
    pub(crate) name: String,
    pub(crate) answers: HashMap<(String, String, u64), Value>,
    pub(crate) vectors: HashMap<(String, String), Vec<f64>>,
}

impl OracleClient {
    pub fn new(name: impl Into<String>) -> Self {
        OracleClient {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn insert_answer(&mut self, instance_id: &str, task: &str, seed: u64, answer: Value) {
        self.answers.insert((instance_id.to_string(), task.to_string(), seed), answer);
    }

    pub fn insert_vector(&mut self, instance_id: &str, text: &str, v: Vec<f64>) {
        self.vectors.insert((instance_id.to_string(), text.to_string()), v);
    }
}

impl ModelClient for OracleClient {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn chat(&self, req: &ChatRequest) -> Result<ChatReply, ClientError> {
        self.answers
            .get(&(req.instance_id.clone(), req.task.clone(), req.seed))
            .map(|a| ChatReply::answer(a.clone()))
            .ok_or_else(|| ClientError::NoReply(format!("{}/{}/{}", req.instance_id, req.task, req.seed)))
    }

    fn embed(&self, req: &EmbedRequest) -> Result<Vec<f64>, ClientError> {
        self.vectors
            .get(&(req.instance_id.clone(), req.text.clone()))
            .cloned()
            .ok_or_else(|| ClientError::NoReply(format!("{}: {}", req.instance_id, req.text)))
    }
}

#[derive(Deserialize)]
struct FileReply {
    instance_id: String,
    task: String,
    seed: u64,
    #[serde(default)]
    reasoning: String,
    answer: Value,
}

#[derive(Deserialize)]
struct FileVector {
    instance_id: String,
    text: String,
    vector: Vec<f64>,
}

/// Offline client reading recorded replies from JSON Lines.
///
/// Chat lines: `{"instance_id", "task", "seed", "reasoning"?, "answer"}`.
/// Embedding lines: `{"instance_id", "text", "vector"}`.
#[derive(Debug, Clone, Default)]
pub struct FileClient {
    inner: OracleClient,
    reasoning: HashMap<(String, String, u64), String>,
}

impl FileClient {
    pub fn load(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut c = FileClient {
            inner: OracleClient::new(format!("file:{}", path.display())),
            reasoning: HashMap::new(),
        };
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = |e: serde_json::Error| {
                std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1))
            };
            let v: Value = serde_json::from_str(line).map_err(bad)?;
            if v.get("vector").is_some() {
                let r: FileVector = serde_json::from_value(v).map_err(bad)?;
                c.inner.insert_vector(&r.instance_id, &r.text, r.vector);
            } else {
                let r: FileReply = serde_json::from_value(v).map_err(bad)?;
                c.reasoning
                    .insert((r.instance_id.clone(), r.task.clone(), r.seed), r.reasoning);
                c.inner.insert_answer(&r.instance_id, &r.task, r.seed, r.answer);
            }
        }
        Ok(c)
    }
}

impl ModelClient for FileClient {
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    fn chat(&self, req: &ChatRequest) -> Result<ChatReply, ClientError> {
        let mut reply = self.inner.chat(req)?;
        if let Some(r) = self.reasoning.get(&(req.instance_id.clone(), req.task.clone(), req.seed)) {
            reply.reasoning = r.clone();
            reply.raw = json!({"reasoning": r, "answer": reply.answer}).to_string();
        }
        Ok(reply)
    }

    fn embed(&self, req: &EmbedRequest) -> Result<Vec<f64>, ClientError> {
        self.inner.embed(req)
    }
}

/// Connection settings shared by the HTTP clients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HttpSettings {
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the bearer token.
    pub token_env: String,
    pub timeout_s: u64,
}

impl HttpSettings {
    fn agent(&self) -> ureq::Agent {
        ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(self.timeout_s)))
            .http_status_as_error(false)
            .build()
            .into()
    }

    fn post(&self, agent: &ureq::Agent, body: &Value) -> Result<Value, ClientError> {
        let mut req = agent.post(&self.endpoint).header("Content-Type", "application/json");
        let token = std::env::var(&self.token_env).ok();
        let auth = token.map(|t| format!("Bearer {t}"));
        if let Some(a) = &auth {
            req = req.header("Authorization", a);
        }
        let mut resp = req.send_json(body).map_err(|e| ClientError::Transport {
            message: e.to_string(),
            retryable: true,
        })?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| ClientError::Transport {
            message: e.to_string(),
            retryable: true,
        })?;
        if !(200..300).contains(&status) {
            return Err(ClientError::Status { status, body: text });
        }
        serde_json::from_str(&text).map_err(|e| ClientError::BadReply(e.to_string()))
    }
}

/// Chat-completions style endpoint: `model`, `messages`, `seed`,
/// `max_completion_tokens`, `response_format` with a JSON schema.
pub struct HttpChatClient {
    settings: HttpSettings,
    agent: ureq::Agent,
}

impl HttpChatClient {
    pub fn new(settings: HttpSettings) -> Self {
        let agent = settings.agent();
        HttpChatClient { settings, agent }
    }

    pub fn request_body(&self, req: &ChatRequest) -> Value {
        json!({
            "model": self.settings.model,
            "messages": [
                {"role": "system", "content": req.system},
                {"role": "user", "content": req.user}
            ],
            "seed": req.seed,
            "max_completion_tokens": req.max_tokens,
            "response_format": {
                "type": "json_schema",
                "json_schema": {"name": "reply", "strict": true, "schema": req.schema.json_schema()}
            }
        })
    }
}

impl ModelClient for HttpChatClient {
    fn name(&self) -> String {
        self.settings.model.clone()
    }

    fn chat(&self, req: &ChatRequest) -> Result<ChatReply, ClientError> {
        let v = self.settings.post(&self.agent, &self.request_body(req))?;
        let content = v
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .ok_or_else(|| ClientError::BadReply("missing choices[0].message.content".into()))?;
        Ok(ChatReply::from_content(content))
    }
}

/// Embeddings style endpoint: `model`, `input`; reads `data[0].embedding`.
pub struct HttpEmbeddingClient {
    settings: HttpSettings,
    agent: ureq::Agent,
}

impl HttpEmbeddingClient {
    pub fn new(settings: HttpSettings) -> Self {
        let agent = settings.agent();
        HttpEmbeddingClient { settings, agent }
    }
}

impl ModelClient for HttpEmbeddingClient {
    fn name(&self) -> String {
        self.settings.model.clone()
    }

    fn embed(&self, req: &EmbedRequest) -> Result<Vec<f64>, ClientError> {
        let body = json!({"model": self.settings.model, "input": req.input()});
        let v = self.settings.post(&self.agent, &body)?;
        let arr = v
            .pointer("/data/0/embedding")
            .and_then(Value::as_array)
            .ok_or_else(|| ClientError::BadReply("missing data[0].embedding".into()))?;
        arr.iter()
            .map(|x| x.as_f64().ok_or_else(|| ClientError::BadReply("non-numeric embedding".into())))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(schema: AnswerSchema) -> ChatRequest {
        ChatRequest {
            instance_id: "i".into(),
            task: "ranking".into(),
            seed: 3,
            system: "s".into(),
            user: "Sentence: p\nSentence1: a\nSentence2: b\nSentence3: c".into(),
            max_tokens: 10,
            schema,
        }
    }

    #[test]
    fn reply_parsing() {
        let r = ChatReply::from_content(r#"{"reasoning": "because", "answer": [2, 1]}"#);
        assert_eq!(r.answer, json!([2, 1]));
        assert_eq!(r.reasoning, "because");
        let r = ChatReply::from_content("∀x P(x)");
        assert_eq!(r.answer, json!("∀x P(x)"));
    }

    #[test]
    fn fixed_answers() {
        let c = FixedAnswerClient { position: 1 };
        assert_eq!(c.chat(&req(AnswerSchema::Integer)).unwrap().answer, json!(1));
        assert_eq!(c.chat(&req(AnswerSchema::IntegerList)).unwrap().answer, json!([1, 2, 3]));
    }

    #[test]
    fn file_client() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.jsonl");
        std::fs::write(
            &p,
            "{\"instance_id\": \"i\", \"task\": \"ranking\", \"seed\": 3, \"reasoning\": \"r\", \"answer\": [3, 2, 1]}\n\
             {\"instance_id\": \"i\", \"text\": \"hello\", \"vector\": [1.0, 0.0]}\n",
        )
        .unwrap();
        let c = FileClient::load(&p).unwrap();
        let r = c.chat(&req(AnswerSchema::IntegerList)).unwrap();
        assert_eq!(r.answer, json!([3, 2, 1]));
        assert_eq!(r.reasoning, "r");
        let mut other = req(AnswerSchema::IntegerList);
        other.seed = 12;
        assert!(matches!(c.chat(&other), Err(ClientError::NoReply(_))));
        let e = EmbedRequest {
            instance_id: "i".into(),
            text: "hello".into(),
            instruction: None,
        };
        assert_eq!(c.embed(&e).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn chat_body_shape() {
        let c = HttpChatClient::new(HttpSettings {
            endpoint: "http://127.0.0.1:9/v1/chat/completions".into(),
            model: "m".into(),
            token_env: "FOLBENCH_TEST_TOKEN".into(),
            timeout_s: 1,
        });
        let b = c.request_body(&req(AnswerSchema::Integer));
        assert_eq!(b["seed"], json!(3));
        assert_eq!(b["messages"][1]["content"], json!(req(AnswerSchema::Integer).user));
        assert_eq!(b["response_format"]["json_schema"]["schema"]["properties"]["answer"]["type"], json!("integer"));
        // nothing listens on the discard port
        let err = c.chat(&req(AnswerSchema::Integer)).unwrap_err();
        assert!(err.is_retryable());
    }

    #[test]
    fn retry_classification() {
        assert!(ClientError::Status { status: 503, body: String::new() }.is_retryable());
        assert!(ClientError::Status { status: 429, body: String::new() }.is_retryable());
        assert!(!ClientError::Status { status: 400, body: String::new() }.is_retryable());
        assert!(!ClientError::BadReply(String::new()).is_retryable());
    }
}
