"""Dynamic unit-disk range emptiness and related structures."""
