/** Client-side pre-validation.
 *
 * Everything here only spares a round trip; the server enforces the same
 * rule (and more) on every path.
 */

export const BASIC_SEARCH_MAX = 30;
export const PASSWORD_MIN = 8;
export const DESCRIPTION_MAX = 500;
export const COMMENT_MAX = 2000;
export const UPLOAD_MAX_BYTES = 2 * 1024 * 1024;

export interface FieldError {
  field: string;
  message: string;
}

/** Cap search input at 30 characters (the textbox stops accepting more). */
export function capSearchInput(value: string): string {
  return value.slice(0, BASIC_SEARCH_MAX);
}

/** Wire the cap into a live input so the 31st character never lands. */
export function attachSearchCap(input: HTMLInputElement): void {
  input.maxLength = BASIC_SEARCH_MAX;
  input.addEventListener("input", () => {
    if (input.value.length > BASIC_SEARCH_MAX) {
      input.value = capSearchInput(input.value);
    }
  });
}

/** Empty search is stopped locally: no network call, inline error. */
export function validateSearchText(value: string): FieldError | null {
  if (!value.trim()) {
    return { field: "text", message: "Enter something to search for." };
  }
  return null;
}

export function validatePasswordChange(current: string, next: string,
                                       confirm: string): FieldError | null {
  if (!current) return { field: "current", message: "Current password is required." };
  if (next.length < PASSWORD_MIN) {
    return { field: "new",
             message: `New password needs at least ${PASSWORD_MIN} characters.` };
  }
  if (next !== confirm) {
    return { field: "confirm", message: "New passwords do not match." };
  }
  return null;
}

export function validateRequestForm(identifier: string, description: string,
                                    requiresIdentifier: boolean): FieldError | null {
  if (requiresIdentifier && !identifier.trim()) {
    return { field: "identifier",
             message: "This request type needs a barcode or serial number." };
  }
  if (description.length > DESCRIPTION_MAX) {
    return { field: "description",
             message: `Description is capped at ${DESCRIPTION_MAX} characters.` };
  }
  return null;
}

export function validateAnnotation(comment: string): FieldError | null {
  if (!comment.trim()) {
    return { field: "comment", message: "Comment must not be empty." };
  }
  if (comment.length > COMMENT_MAX) {
    return { field: "comment",
             message: `Comment is capped at ${COMMENT_MAX} characters.` };
  }
  return null;
}

export function validateUpload(sizeBytes: number): FieldError | null {
  if (sizeBytes > UPLOAD_MAX_BYTES) {
    return { field: "file", message: "Uploads are capped at 2 MB." };
  }
  return null;
}

/** Request types whose seeded description demands an asset identifier. */
export function requiresIdentifier(reqTypeId: number): boolean {
  return [2, 3, 4, 6].includes(reqTypeId);
}
