"""
Upload modal component for price panel import.
"""
import streamlit as st

from config import DATE_COLUMN
from upload_handler import process_upload


def render_upload_css():
    """Render custom CSS for the upload modal."""
    st.markdown("""
    <style>
    .upload-header {
        text-align: center;
        padding: 48px 20px;
        margin: -1rem -1rem 2rem -1rem;
        background: linear-gradient(135deg, #1a1a2e 0%, #16213e 50%, #0f3460 100%);
        border-radius: 0 0 30px 30px;
    }
    .upload-header h1 {
        color: white;
        font-size: 2.0rem;
        font-weight: 600;
        margin: 0 0 8px 0;
    }
    .upload-header p {
        color: rgba(255,255,255,0.7);
        font-size: 1.05rem;
        margin: 0;
    }

    /* Steps */
    .steps-container {
        display: grid;
        grid-template-columns: repeat(3, 1fr);
        gap: 16px;
        margin: 0 0 2rem 0;
    }
    .step-card {
        background: #f8f9fa;
        border-radius: 12px;
        padding: 24px 20px;
        text-align: center;
        border: 1px solid #e9ecef;
    }
    .step-card h4 {
        font-size: 0.95rem;
        font-weight: 600;
        color: #212529;
        margin: 0 0 6px 0;
    }
    .step-card p {
        font-size: 0.82rem;
        color: #6c757d;
        margin: 0;
    }

    [data-testid="stFileUploader"] {
        background: #f8f9fa;
        border-radius: 12px;
        border: 2px dashed #dee2e6;
        padding: 20px;
    }
    </style>
    """, unsafe_allow_html=True)


def render_upload_modal():
    """
    Render the upload modal for importing a price panel.

    Returns:
        str or None: Path to newly uploaded dataset, or None if no upload
    """
    render_upload_css()

    st.markdown("""
    <div class="upload-header">
        <h1>Upload a price panel</h1>
        <p>One date column and two or more price series</p>
    </div>
    """, unsafe_allow_html=True)

    st.markdown("""
    <div class="steps-container">
        <div class="step-card">
            <h4>1. Prepare a CSV</h4>
            <p>Header row, dates as YYYY-MM or YYYY-MM-DD</p>
        </div>
        <div class="step-card">
            <h4>2. Upload below</h4>
            <p>Every cell must hold a number</p>
        </div>
        <div class="step-card">
            <h4>3. Run the tests</h4>
            <p>Pick a benchmark and target markets</p>
        </div>
    </div>
    """, unsafe_allow_html=True)

    date_column = st.text_input("Date column", value=DATE_COLUMN, key="upload_date_column")
    uploaded_csv = st.file_uploader(
        "Drop your price panel CSV here",
        type=['csv'],
        key="csv_uploader",
        help="Monthly prices, oldest first"
    )

    if uploaded_csv is not None:
        with st.spinner("Checking the panel..."):
            success, message, dataset_path = process_upload(
                uploaded_csv,
                uploaded_csv.name,
                date_column,
            )

        if success:
            st.success(message)
            st.session_state.active_dataset = dataset_path
            st.session_state.show_upload_modal = False
            st.session_state.report = None
            st.cache_data.clear()
            st.rerun()
        else:
            st.error(message)
            with st.expander("Troubleshooting"):
                st.markdown(f"""
                - The first row must name the columns, one of them `{date_column}`
                - Dates must be strictly increasing, with no duplicates
                - Missing values are not filled in: remove incomplete rows first
                """)
        return dataset_path if success else None

    return None
