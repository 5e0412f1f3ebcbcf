"""
Streamlit Dashboard for Threshold Cointegration Analysis

Run with: streamlit run app.py
"""
from pathlib import Path

import pandas as pd
import streamlit as st

from config import (
    APP_NAME,
    DEFAULT_GATE,
    DEFAULT_GRID_POINTS,
    DEFAULT_REPLICATIONS,
    DEFAULT_TRIM,
    PANEL_FILE,
    SCHEMES,
)
from errors import AnalysisError
from pipeline import PipelineConfig, run_pipeline
from reports import FIT_HEADERS, TEST_HEADERS, format_estimate, format_pvalue, format_statistic, format_tau, to_json
from components.upload_modal import render_upload_modal
from components.data_manager import render_data_manager, initialize_session_state

# Page config
st.set_page_config(
    page_title=APP_NAME,
    page_icon="📈",
    layout="wide",
    initial_sidebar_state="expanded"
)

st.markdown("""
<style>
    .app-header {
        background: linear-gradient(135deg, #1a1a2e 0%, #16213e 50%, #0f3460 100%);
        padding: 30px 40px;
        border-radius: 0 0 20px 20px;
        margin: -1rem -1rem 2rem -1rem;
    }
    .app-header h1 {
        color: white !important;
        font-size: 1.8rem;
        font-weight: 600;
        margin: 0;
    }
    .section-header {
        font-size: 1.1rem;
        font-weight: 600;
        color: #1a1a2e;
        margin: 2rem 0 1rem 0;
        padding-bottom: 8px;
        border-bottom: 2px solid #e9ecef;
    }
    .stDataFrame {
        border-radius: 12px;
        overflow: hidden;
    }
</style>
""", unsafe_allow_html=True)


# Initialize session state
initialize_session_state()


@st.cache_data(show_spinner=False)
def run_analysis(config: dict) -> dict:
    """Run and cache the pipeline for one configuration."""
    return run_pipeline(PipelineConfig.from_dict(config))


def test_table_frame(rows: list[dict]) -> pd.DataFrame:
    return pd.DataFrame(
        [[r["market"], format_statistic(r["lm"]), format_pvalue(r["pvalue"]), format_tau(r["tau_hat"])]
         for r in rows],
        columns=TEST_HEADERS,
    )


def fit_table_frame(rows: list[dict]) -> pd.DataFrame:
    return pd.DataFrame(
        [[r["equation"], r["variable"],
          format_estimate(r["regime1"]["est"], r["regime1"]["se"]),
          format_estimate(r["regime2"]["est"], r["regime2"]["se"])]
         for r in rows],
        columns=["Equation"] + FIT_HEADERS,
    )


def render_controls(dataset: dict) -> dict:
    """Sidebar protocol controls; returns a PipelineConfig dict."""
    st.sidebar.markdown("---")
    st.sidebar.markdown("### Protocol")

    if dataset['kind'] == "upload":
        columns = dataset['columns']
        benchmark = st.sidebar.selectbox("Benchmark", columns, index=0)
        others = [c for c in columns if c != benchmark]
        targets = st.sidebar.multiselect("Target markets", others, default=others[:1])
        source = {
            "input": str(Path(dataset['path']) / PANEL_FILE),
            "benchmark": benchmark,
            "targets": targets,
            "date_column": dataset.get('date_column') or "date",
        }
    else:
        st.sidebar.caption(f"Benchmark {dataset['columns'][0]}, target {dataset['columns'][1]}")
        source = {"dataset": dataset['name']}

    fast = st.sidebar.toggle("Fast profile", value=True,
                             help="50 grid points and 200 bootstrap replications")
    with st.sidebar.expander("Grid and bootstrap", expanded=not fast):
        grid_points = st.number_input("Grid points", min_value=2, value=DEFAULT_GRID_POINTS,
                                      disabled=fast)
        replications = st.number_input("Replications", min_value=1, value=DEFAULT_REPLICATIONS,
                                       disabled=fast)
        trim = st.number_input("Trim", min_value=0.01, max_value=0.49, value=DEFAULT_TRIM, step=0.01)
        scheme = st.selectbox("Bootstrap scheme", SCHEMES)
        fix_beta = st.checkbox("Hold beta at the Engle-Granger estimate")

    with st.sidebar.expander("Model", expanded=False):
        lag_choice = st.selectbox("VECM lags", ["auto", 0, 1, 2, 3, 4, 5, 6])
        criterion = st.selectbox("Lag criterion", ["bic", "aic"])
        trend = st.checkbox("Include a linear trend")
        log_prices = st.checkbox("Analyze log prices")
        gate = st.number_input("Fit the TVECM at p-values up to", min_value=0.01, max_value=0.99,
                               value=DEFAULT_GATE, step=0.01)
        force_fit = st.checkbox("Fit the TVECM regardless of the test")

    seed = st.sidebar.number_input("Seed", min_value=0, value=20050831, step=1)

    config = PipelineConfig.from_dict({
        **source,
        "lags": lag_choice,
        "criterion": criterion,
        "deterministic": "ct" if trend else "c",
        "grid_points": int(grid_points),
        "replications": int(replications),
        "trim": float(trim),
        "scheme": scheme,
        "fix_beta": fix_beta,
        "seed": int(seed),
        "log_transform": log_prices,
        "gate": float(gate),
        "force_fit": force_fit,
    })
    if fast:
        config = config.fast()
    return config.to_dict()


def render_market(market: dict):
    """Stage-by-stage results for one target market."""
    stages = market["stages"]
    st.markdown(f'<h2 class="section-header">{market["market"]}</h2>', unsafe_allow_html=True)
    st.caption(f"{market['sample'][0]} to {market['sample'][1]}, {market['nobs']} observations")

    if "unit_root" in stages:
        rows = []
        for role in ("benchmark", "target"):
            entry = stages["unit_root"][role]
            for form in ("levels", "differences"):
                for test, r in entry[form].items():
                    rows.append({
                        "Series": entry["series"],
                        "Form": form,
                        "Test": test,
                        "Statistic": format_statistic(r["statistic"]),
                        "Lags": r["lags"],
                        "5% critical value": format_statistic(r["critical_values"]["5%"]),
                    })
        st.markdown("**Unit roots**")
        st.dataframe(pd.DataFrame(rows), hide_index=True, use_container_width=True)

    if "engle_granger" in stages:
        eg = stages["engle_granger"]
        col1, col2, col3 = st.columns(3)
        col1.metric("Cointegrating beta", format_statistic(eg["vector"]["beta"]))
        col2.metric("Residual ADF", format_statistic(eg["residual_test"]["statistic"]))
        col3.metric("VECM lags", eg["lags"])

    if "threshold_test" in stages:
        t = stages["threshold_test"]
        col1, col2, col3 = st.columns(3)
        col1.metric("Sup-LM", format_statistic(t["lm"]))
        col2.metric("Bootstrap p-value", format_pvalue(t["pvalue"]))
        col3.metric("Threshold", format_tau(t["tau_hat"]))

    if "tvecm" in stages:
        fit = stages["tvecm"]["fit"]
        shares = fit["regime_shares"]
        st.markdown(f"**Threshold VECM** (regime shares {shares[0]:.1%} / {shares[1]:.1%})")
        st.dataframe(fit_table_frame(stages["tvecm"]["table"]), hide_index=True,
                     use_container_width=True)

    for note in market["notes"]:
        st.info(note)
    if market["error"]:
        st.error(f"Stage '{market['error']['stage']}' failed: {market['error']['message']}")


def main():
    # Show the upload modal if the user requested it
    if st.session_state.get('show_upload_modal'):
        render_upload_modal()
        if st.button("← Back to Dashboard"):
            st.session_state.show_upload_modal = False
            st.rerun()
        st.stop()

    st.markdown(f"""
    <div class="app-header">
        <h1>{APP_NAME}</h1>
    </div>
    """, unsafe_allow_html=True)

    dataset = render_data_manager()
    if not dataset:
        st.warning("No dataset available. Please upload a price panel.")
        st.stop()

    config = render_controls(dataset)
    if dataset['kind'] == "upload" and not config["targets"]:
        st.info("Pick at least one target market in the sidebar.")
        st.stop()

    if st.sidebar.button("Run analysis", type="primary", use_container_width=True):
        with st.spinner("Running unit-root, cointegration and threshold tests..."):
            try:
                st.session_state.report = run_analysis(config)
            except AnalysisError as e:
                st.session_state.report = None
                st.error(f"Analysis failed: {e}")

    report = st.session_state.get('report')
    if not report:
        st.caption("Set the protocol in the sidebar and press Run analysis.")
        return

    if report["threshold_tests"]:
        st.markdown('<h2 class="section-header">Threshold cointegration tests</h2>',
                    unsafe_allow_html=True)
        st.dataframe(test_table_frame(report["threshold_tests"]), hide_index=True,
                     use_container_width=True)

    for market in report["markets"]:
        render_market(market)

    with st.expander("Full report (JSON)"):
        st.json(to_json(report))
    st.download_button("Download report", to_json(report), file_name="report.json",
                       mime="application/json")


if __name__ == "__main__":
    main()
