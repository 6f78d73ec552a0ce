"""meflex: backend for a nonlinear, versioned business-plan ideation canvas.

Ideas live on a canvas as cards. Extending a card horizontally refines the
same idea; extending vertically branches a new variation. Either way the
child inherits every section draft, so each card is a complete, editable
version of the plan. Section-specific chat agents help write each part,
every reply is followed by an open-ended reflection question, and each
extended card can carry an evolution summary grounded in the diff against
its parent.
"""
from .agents import (
    AgentRole,
    AgentRoles,
    build_section_prompt,
    generate_meta_reflection,
    load_agent_roles,
    refine_meta_reflection,
    resolve_agent,
    section_chat,
)
from .errors import (
    AuthFailedError,
    CorruptFileError,
    EmptyMessageError,
    EmptySectionCannotBeDoneError,
    EmptyTitleError,
    InvalidKindError,
    InvalidSectionError,
    MalformedResponseError,
    MeflexError,
    NodeHasChildrenError,
    NoMetaReflectionYetError,
    NotOnSameLineageError,
    ProviderError,
    ProviderTimeoutError,
    RateLimitedError,
    RootHasNoEvolutionError,
    StoreIoError,
    UnknownNodeError,
    UnknownProjectError,
    UnsupportedSchemaVersionError,
)
from .graph import (
    completion_summary,
    create_project,
    create_root_node,
    delete_node,
    diff_nodes,
    edit_section,
    extend_node,
    get_lineage,
    list_children,
    move_node,
    set_section_done,
)
from .model import (
    SCHEMA_VERSION,
    SECTION_ORDER,
    ChangeKind,
    ChangeSet,
    ChatMessage,
    CompletionSummary,
    ExtensionKind,
    IdeaNode,
    MessageRole,
    Project,
    Section,
    SectionChange,
    SectionDraft,
    SectionStatus,
)
from .provider import (
    CompletionResult,
    FinishReason,
    HttpProvider,
    PromptBundle,
    ProviderConfig,
    SamplingParams,
    ScriptedProvider,
    scripted_provider,
)
from .service import create_app
from .store import (
    ProjectRegistry,
    export_markdown,
    load_project,
    load_topics,
    save_project,
)

__version__ = "0.1.0"
