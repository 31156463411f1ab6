"""
WSGI module - alternative entry point for deployment
gunicorn / uvicorn 이 찾는 application 객체를 노출한다.
"""

from go_turing.main import app

# ASGI application for gunicorn (uvicorn worker) / uvicorn
application = app
