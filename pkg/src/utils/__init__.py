"""Utils package - logging and file output helpers."""
