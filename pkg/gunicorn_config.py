"""
Gunicorn configuration for serving the simulation API.
"""

import multiprocessing
import os

bind = os.getenv("BIND", "0.0.0.0:8000")

# POST /api/experiments/runs executes a whole simulation inside the request,
# so keep worker count modest and the timeout generous.
workers = int(os.getenv("GUNICORN_WORKERS", multiprocessing.cpu_count() + 1))
worker_class = "sync"
timeout = int(os.getenv("GUNICORN_TIMEOUT", "300"))
graceful_timeout = 30
keepalive = 5

# Recycle workers periodically
max_requests = 500
max_requests_jitter = 50

accesslog = "-"
errorlog = "-"
loglevel = os.getenv("LOG_LEVEL", "info")

# %(M) = request time in milliseconds
access_log_format = '%(h)s %(t)s "%(r)s" %(s)s %(b)s %(M)sms'

proc_name = "culturesim"

preload_app = True
reload = os.getenv("ENVIRONMENT") in ["development", "dev", "local"]
