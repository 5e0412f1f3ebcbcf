"""
Data manager component for the sidebar.
Allows users to switch between bundled and uploaded panels and manage uploads.
"""
import streamlit as st
from datetime import datetime

from samples import list_bundled
from upload_handler import (
    get_available_datasets,
    delete_dataset,
)


def dataset_options() -> list[dict]:
    """Uploaded panels first (newest first), then the bundled synthetic ones."""
    options = []
    for d in get_available_datasets():
        options.append({
            "kind": "upload",
            "key": d['path'],
            "path": d['path'],
            "columns": d.get('columns', []),
            "date_column": d.get('date_column'),
            "n_obs": d.get('n_obs', 0),
            "first_date": d.get('first_date'),
            "last_date": d.get('last_date'),
            "upload_date": d.get('upload_date'),
            "source_filename": d.get('source_filename'),
        })
    for d in list_bundled():
        options.append({
            "kind": "bundled",
            "key": f"bundled:{d['name']}",
            "name": d['name'],
            "columns": d['labels'],
            "n_obs": d['n_obs'],
            "first_date": d['start'],
            "description": d['description'],
        })
    return options


def option_label(option: dict) -> str:
    if option['kind'] == "bundled":
        return f"{option['name']} (synthetic, {option['n_obs']} obs)"
    name = option.get('source_filename') or option['key']
    upload_date = option.get('upload_date')
    if upload_date:
        try:
            name = f"{name}, {datetime.fromisoformat(upload_date).strftime('%b %d, %Y')}"
        except ValueError:
            pass
    return f"{name} ({option['n_obs']} obs)"


def render_data_manager():
    """
    Render the data manager in the sidebar.
    Handles dataset selection and management.

    Returns:
        dict or None: The selected dataset option
    """
    options = dataset_options()

    if not options:
        return None

    st.sidebar.markdown("---")
    st.sidebar.markdown("### Data Management")

    # Get current selection from session state
    current_idx = 0
    for i, option in enumerate(options):
        if option['key'] == st.session_state.get('active_dataset'):
            current_idx = i
            break

    selected_idx = st.sidebar.selectbox(
        "Active Dataset",
        range(len(options)),
        index=current_idx,
        format_func=lambda i: option_label(options[i]),
        key="dataset_selector"
    )
    selected = options[selected_idx]

    # Store selected dataset in session state
    st.session_state.active_dataset = selected['key']

    # Dataset info
    with st.sidebar.expander("Dataset Info", expanded=False):
        col1, col2 = st.columns(2)
        with col1:
            st.metric("Observations", f"{selected['n_obs']:,}")
        with col2:
            st.metric("Series", len(selected['columns']))

        st.caption(", ".join(selected['columns']))
        if selected['kind'] == "bundled":
            st.caption(selected.get('description') or "")
            st.caption(f"Simulated monthly from {selected['first_date']}")
        else:
            st.caption(f"{selected['first_date']} to {selected['last_date']}")
            upload_date = selected.get('upload_date')
            if upload_date:
                try:
                    dt = datetime.fromisoformat(upload_date)
                    st.caption(f"Uploaded: {dt.strftime('%Y-%m-%d %H:%M')}")
                except ValueError:
                    pass

    # Action buttons
    col1, col2 = st.sidebar.columns(2)

    with col1:
        if st.button("📤 New", use_container_width=True, help="Upload a price panel"):
            st.session_state.show_upload_modal = True
            st.rerun()

    with col2:
        if st.button("🗑️ Delete", use_container_width=True, help="Delete current dataset",
                     disabled=selected['kind'] == "bundled"):
            st.session_state.confirm_delete = True
            st.rerun()

    # Deletion confirmation
    if st.session_state.get('confirm_delete') and selected['kind'] == "upload":
        st.sidebar.warning(f"Delete dataset with {selected['n_obs']:,} observations?")
        col1, col2 = st.sidebar.columns(2)
        with col1:
            if st.button("Yes, delete", type="primary", use_container_width=True, key="confirm_delete_btn"):
                success, msg = delete_dataset(selected['path'])
                if success:
                    st.session_state.confirm_delete = False
                    st.session_state.active_dataset = None
                    st.session_state.report = None
                    st.cache_data.clear()
                    st.rerun()
                else:
                    st.sidebar.error(msg)
        with col2:
            if st.button("Cancel", use_container_width=True, key="cancel_delete_btn"):
                st.session_state.confirm_delete = False
                st.rerun()

    return selected


def initialize_session_state():
    """Initialize session state variables for data management."""
    if 'active_dataset' not in st.session_state:
        options = dataset_options()
        st.session_state.active_dataset = options[0]['key'] if options else None

    if 'show_upload_modal' not in st.session_state:
        st.session_state.show_upload_modal = False

    if 'confirm_delete' not in st.session_state:
        st.session_state.confirm_delete = False

    if 'report' not in st.session_state:
        st.session_state.report = None
