import os

import requests
import streamlit as st
from dotenv import load_dotenv

load_dotenv()

# --- Configuration ---
COLORING_API_URL = os.getenv("COLORING_API_URL", "http://localhost:8000")
st.set_page_config(page_title="Graph Coloring", page_icon="🎨", layout="centered")


@st.cache_data(ttl=300)
def fetch_algorithms():
    response = requests.get(f"{COLORING_API_URL}/algorithms", timeout=10)
    response.raise_for_status()
    return response.json()


# --- UI Elements ---
st.title("🎨 Turbo-charged Graph Coloring")
st.markdown("Upload a DIMACS `.col` graph, pick an algorithm and a seed, and get a verified coloring.")

if "result" not in st.session_state:
    st.session_state.result = None

# --- Sidebar for settings ---
with st.sidebar:
    st.header("Settings")
    try:
        algorithms = fetch_algorithms()
    except requests.exceptions.RequestException as e:
        st.error(f"API Error: could not reach {COLORING_API_URL}. Details: {e}")
        st.stop()
    algo = st.selectbox("Algorithm", algorithms, index=algorithms.index("dyn-tc") if "dyn-tc" in algorithms else 0)
    seed = st.number_input("Seed", min_value=0, value=1, step=1)
    k_best = st.number_input("Color budget (0 = use greedy result)", min_value=0, value=0, step=1)

uploaded_file = st.file_uploader("Choose a .col file", type="col")

if uploaded_file is not None and st.button("Color graph"):
    with st.spinner("Coloring... large graphs can take a while."):
        try:
            files = {"col_file": (uploaded_file.name, uploaded_file.getvalue(), "text/plain")}
            data = {"algo": algo, "seed": int(seed)}
            if k_best:
                data["k_best"] = int(k_best)
            response = requests.post(f"{COLORING_API_URL}/color", files=files, data=data)
            response.raise_for_status()
            st.session_state.result = response.json()
        except requests.exceptions.RequestException as e:
            detail = getattr(e.response, "text", "") if getattr(e, "response", None) is not None else ""
            st.error(f"API Error: {e} {detail}")
            st.session_state.result = None

result = st.session_state.result
if result:
    st.success(f"✅ {result['instance']}: {result['colors']} colors in {result['time_ms']} ms")
    col1, col2, col3 = st.columns(3)
    col1.metric("Vertices", result["n"])
    col2.metric("Edges", result["m"])
    col3.metric("Colors", result["colors"])
    if result.get("stats"):
        stats = result["stats"]
        st.caption(
            f"Regret events: {stats['regret_events']} · repairs accepted "
            f"{stats['rollbacks_accepted']}/{stats['rollbacks_attempted']}"
        )
    assignment = "".join(f"{v + 1} {color}\n" for v, color in enumerate(result["assignment"]))
    st.download_button("Download assignment", assignment, file_name=f"{result['instance']}.sol")
