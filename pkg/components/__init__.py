"""
UI Components for the threshold cointegration dashboard.
"""
from components.upload_modal import render_upload_modal
from components.data_manager import render_data_manager

__all__ = ['render_upload_modal', 'render_data_manager']
