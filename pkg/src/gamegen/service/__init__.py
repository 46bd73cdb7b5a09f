"""Service surface: steering session manager, wire protocol, TCP listener,
HTTP/WebSocket application, and the procedural preview renderer."""
