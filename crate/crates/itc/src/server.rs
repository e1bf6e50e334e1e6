//! Single-session HTTP API for interactive cutting.
//!
//! Mutations take the session's write lock, so they apply one at a time; reads
//! share the lock. Every mutation answers with the full refreshed state.

use std::sync::Arc;

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use itc_core::cutting::{decision_graph, identify_edge_by_click, int_dcc_cut, ClickPoint, SelectionBox};
use itc_core::document::{decision_graph_entries, DecisionGraphEntry, TreeDocument};
use itc_core::intree::{CutMethod, InTree};
use itc_core::metrics::DistanceMatrix;
use itc_core::pipeline::{Prepared, Sigma};
use itc_core::potential::PotentialField;
use itc_core::rootfind::{compute_tree_height, find_roots_doubling};
use serde::{Deserialize, Serialize};
use tokio::sync::RwLock;

struct Action {
    cuts: usize,
    clicked: bool,
}

pub struct Session {
    prepared: Prepared,
    coords: Option<Vec<[f64; 2]>>,
    tree: InTree,
    /// Undoable actions, oldest first.
    actions: Vec<Action>,
    clicks: Vec<ClickPoint>,
}

impl Session {
    pub fn new(distances: DistanceMatrix, sigma: Sigma, coords: Option<Vec<[f64; 2]>>) -> itc_core::Result<Self> {
        let prepared = Prepared::new(distances, sigma)?;
        let tree = prepared.tree.clone();
        Ok(Self {
            prepared,
            coords,
            tree,
            actions: Vec::new(),
            clicks: Vec::new(),
        })
    }

    pub fn tree(&self) -> &InTree {
        &self.tree
    }

    pub fn potentials(&self) -> &PotentialField {
        &self.prepared.potentials
    }

    fn state(&self, last_cut: Vec<usize>) -> StateView {
        let assignment = find_roots_doubling(&self.tree).expect("session tree stays a forest");
        StateView {
            tree: TreeDocument::new(&self.tree, &self.prepared.potentials, self.coords.clone()),
            cluster_of: assignment.root_of().iter().map(|r| r + 1).collect(),
            cluster_count: assignment.cluster_count(),
            clicks: self.clicks.clone(),
            last_cut: last_cut.into_iter().map(|v| v + 1).collect(),
            undo_depth: self.actions.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    #[serde(flatten)]
    pub tree: TreeDocument,
    /// Root of each point's cluster, 1-based.
    pub cluster_of: Vec<usize>,
    pub cluster_count: usize,
    pub clicks: Vec<ClickPoint>,
    /// Start vertices cut by the request that produced this state.
    pub last_cut: Vec<usize>,
    pub undo_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub root: usize,
    pub size: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClustersView {
    pub cluster_count: usize,
    pub height: usize,
    pub rounds_used: usize,
    pub clusters: Vec<ClusterEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoxRequest {
    pub p_min: f64,
    pub p_max: f64,
    pub w_min: f64,
    pub w_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeRequest {
    pub from: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaParam {
    Value(f64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsRequest {
    pub sigma: SigmaParam,
}

pub struct ApiError(StatusCode, String);

impl ApiError {
    fn bad(message: impl Into<String>) -> Self {
        Self(StatusCode::BAD_REQUEST, message.into())
    }
}

impl From<itc_core::Error> for ApiError {
    fn from(e: itc_core::Error) -> Self {
        Self::bad(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(serde_json::json!({ "error": self.1 }))).into_response()
    }
}

type Shared = Arc<RwLock<Session>>;
type ApiResult<T> = Result<Json<T>, ApiError>;

pub fn router(session: Session) -> Router {
    Router::new()
        .route("/state", get(get_state))
        .route("/decision-graph", get(get_decision_graph))
        .route("/clusters", get(get_clusters))
        .route("/cut/click", post(cut_click))
        .route("/cut/box", post(cut_box))
        .route("/cut/edge", post(cut_edge))
        .route("/undo", post(undo))
        .route("/params", post(set_params))
        .with_state(Arc::new(RwLock::new(session)))
}

async fn get_state(State(s): State<Shared>) -> Json<StateView> {
    Json(s.read().await.state(Vec::new()))
}

async fn get_decision_graph(State(s): State<Shared>) -> ApiResult<Vec<DecisionGraphEntry>> {
    let s = s.read().await;
    let dg = decision_graph(&s.tree, &s.prepared.potentials)?;
    Ok(Json(decision_graph_entries(&dg)))
}

async fn get_clusters(State(s): State<Shared>) -> ApiResult<ClustersView> {
    let s = s.read().await;
    let a = find_roots_doubling(&s.tree)?;
    Ok(Json(ClustersView {
        cluster_count: a.cluster_count(),
        height: compute_tree_height(&s.tree)?,
        rounds_used: a.rounds_used(),
        clusters: a
            .clusters()
            .iter()
            .map(|(&root, members)| ClusterEntry {
                root: root + 1,
                size: members.len(),
                members: members.iter().map(|m| m + 1).collect(),
            })
            .collect(),
    }))
}

async fn cut_click(State(s): State<Shared>, Json(click): Json<ClickPoint>) -> ApiResult<StateView> {
    let mut s = s.write().await;
    let coords = s
        .coords
        .as_ref()
        .ok_or_else(|| ApiError::bad("click cutting needs 2-D numeric data; use /cut/box"))?;
    let u = identify_edge_by_click(&s.tree, coords, click)?;
    s.tree.cut_edge(u, CutMethod::Interactive)?;
    s.actions.push(Action { cuts: 1, clicked: true });
    s.clicks.push(click);
    Ok(Json(s.state(vec![u])))
}

async fn cut_box(State(s): State<Shared>, Json(b): Json<BoxRequest>) -> ApiResult<StateView> {
    let mut s = s.write().await;
    let selection = SelectionBox::new(b.p_min, b.p_max, b.w_min, b.w_max)?;
    let Session { tree, prepared, .. } = &mut *s;
    let cut = int_dcc_cut(tree, &prepared.potentials, &selection)?;
    if !cut.is_empty() {
        s.actions.push(Action {
            cuts: cut.len(),
            clicked: false,
        });
    }
    Ok(Json(s.state(cut)))
}

async fn cut_edge(State(s): State<Shared>, Json(e): Json<EdgeRequest>) -> ApiResult<StateView> {
    let mut s = s.write().await;
    let n = s.tree.len();
    if e.from == 0 || e.from > n {
        return Err(ApiError::bad(format!("vertex {} outside 1..={n}", e.from)));
    }
    let u = e.from - 1;
    s.tree.cut_edge(u, CutMethod::Interactive)?;
    s.actions.push(Action {
        cuts: 1,
        clicked: false,
    });
    Ok(Json(s.state(vec![u])))
}

async fn undo(State(s): State<Shared>) -> ApiResult<StateView> {
    let mut s = s.write().await;
    let action = s.actions.pop().ok_or_else(|| ApiError::bad("nothing to undo"))?;
    for _ in 0..action.cuts {
        s.tree.undo_last_cut();
    }
    if action.clicked {
        s.clicks.pop();
    }
    Ok(Json(s.state(Vec::new())))
}

async fn set_params(State(s): State<Shared>, Json(p): Json<ParamsRequest>) -> ApiResult<StateView> {
    let sigma: Sigma = match p.sigma {
        SigmaParam::Value(v) if v > 0.0 && v.is_finite() => Sigma::Value(v),
        SigmaParam::Value(v) => return Err(ApiError::bad(format!("sigma must be positive, got {v}"))),
        SigmaParam::Named(name) => name.parse()?,
    };
    let mut s = s.write().await;
    let distances = s.prepared.distances.clone();
    let coords = s.coords.take();
    *s = Session::new(distances, sigma, coords)?;
    Ok(Json(s.state(Vec::new())))
}
