"""Domain error hierarchy.

Every error carries a stable ``code`` token (the closed set the HTTP facade
documents) and the HTTP status it maps to. Provider failures all surface as
``provider_error`` regardless of the concrete subclass.
"""
from __future__ import annotations


class MeflexError(Exception):
    """Base class for all domain errors."""

    code = "error"
    http_status = 500


class EmptyTitleError(MeflexError):
    code = "empty_title"
    http_status = 400

    def __init__(self, message: str = "project title must be non-empty"):
        super().__init__(message)


class UnknownProjectError(MeflexError):
    code = "unknown_project"
    http_status = 404

    def __init__(self, project_id: str):
        self.project_id = project_id
        super().__init__(f"unknown project: {project_id}")


class UnknownNodeError(MeflexError):
    code = "unknown_node"
    http_status = 404

    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"unknown node: {node_id}")


class InvalidKindError(MeflexError):
    code = "invalid_kind"
    http_status = 400


class InvalidSectionError(MeflexError):
    code = "invalid_section"
    http_status = 400

    def __init__(self, tag: str):
        self.tag = tag
        super().__init__(f"unknown section: {tag}")


class EmptyMessageError(MeflexError):
    code = "empty_message"
    http_status = 400

    def __init__(self, message: str = "message must be non-empty"):
        super().__init__(message)


class EmptySectionCannotBeDoneError(MeflexError):
    code = "empty_section_cannot_be_done"
    http_status = 409

    def __init__(self, message: str = "an empty section cannot be marked done"):
        super().__init__(message)


class NotOnSameLineageError(MeflexError):
    code = "not_on_same_lineage"
    http_status = 409


class NodeHasChildrenError(MeflexError):
    code = "node_has_children"
    http_status = 409

    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"node has children and cannot be deleted: {node_id}")


class RootHasNoEvolutionError(MeflexError):
    code = "root_has_no_evolution"
    http_status = 409

    def __init__(self, message: str = "a root node has no earlier version to evolve from"):
        super().__init__(message)


class NoMetaReflectionYetError(MeflexError):
    code = "no_meta_reflection_yet"
    http_status = 409

    def __init__(self, message: str = "meta-reflection has not been generated for this node yet"):
        super().__init__(message)


# ---------------------------------------------------------------------------
# Provider errors
# ---------------------------------------------------------------------------

class ProviderError(MeflexError):
    """Any failure talking to the chat-completion provider."""

    code = "provider_error"
    http_status = 502


class ProviderTimeoutError(ProviderError):
    pass


class RateLimitedError(ProviderError):
    pass


class AuthFailedError(ProviderError):
    pass


class MalformedResponseError(ProviderError):
    pass


# ---------------------------------------------------------------------------
# Persistence errors
# ---------------------------------------------------------------------------

class StoreIoError(MeflexError):
    code = "io_error"
    http_status = 500


class CorruptFileError(MeflexError):
    code = "corrupt_file"
    http_status = 500


class UnsupportedSchemaVersionError(MeflexError):
    code = "unsupported_schema_version"
    http_status = 500

    def __init__(self, found: int, current: int):
        self.found = found
        self.current = current
        super().__init__(f"schema_version {found} is newer than supported version {current}")
