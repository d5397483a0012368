# Command handlers: each renders a service result with rich and emits CSV/JSON.
